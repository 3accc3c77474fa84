// SPDX-License-Identifier: MIT
#include "preventix/numerics.hpp"

#include "preventix/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace preventix::numerics {

namespace {

struct SimpsonCell {
    double a, m, b;
    double fa, fm, fb;
    double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const ScalarFn& f, const SimpsonCell& c, double tol, int depth) {
    const double lm = 0.5 * (c.a + c.m);
    const double rm = 0.5 * (c.m + c.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(c.a, c.m, c.fa, flm, c.fm);
    const double right = simpson(c.m, c.b, c.fm, frm, c.fb);
    const double delta = left + right - c.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !std::isfinite(delta)) {
        return left + right + delta / 15.0;
    }
    return refine(f, {c.a, lm, c.m, c.fa, flm, c.fm, left}, 0.5 * tol, depth - 1) +
           refine(f, {c.m, rm, c.b, c.fm, frm, c.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double rel_tol,
                        int max_depth) {
    if (b == a) {
        return 0.0;
    }
    // A coarse 16-panel pass gives the magnitude used to turn rel_tol into an
    // absolute budget and avoids false convergence on the first cell.
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    std::vector<double> xs(2 * kPanels + 1);
    std::vector<double> fs(2 * kPanels + 1);
    for (int i = 0; i <= 2 * kPanels; ++i) {
        xs[i] = a + 0.5 * h * i;
        fs[i] = f(xs[i]);
    }
    double coarse = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        coarse += simpson(xs[2 * i], xs[2 * i + 2], fs[2 * i], fs[2 * i + 1], fs[2 * i + 2]);
    }
    const double tol =
        std::max(rel_tol * std::abs(coarse), 1e-300) / kPanels;
    double total = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        SimpsonCell c{xs[2 * i], xs[2 * i + 1], xs[2 * i + 2],
                      fs[2 * i], fs[2 * i + 1], fs[2 * i + 2],
                      simpson(xs[2 * i], xs[2 * i + 2], fs[2 * i], fs[2 * i + 1], fs[2 * i + 2])};
        total += refine(f, c, tol, max_depth);
    }
    return total;
}

double adaptive_simpson_split(const ScalarFn& f, double a, double b,
                              const std::vector<double>& breaks, double rel_tol,
                              int max_depth) {
    std::vector<double> pts{a};
    for (double x : breaks) {
        if (x > a && x < b) {
            pts.push_back(x);
        }
    }
    std::sort(pts.begin() + 1, pts.end());
    pts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        total += adaptive_simpson(f, pts[i], pts[i + 1], rel_tol, max_depth);
    }
    return total;
}

double bisect(const ScalarFn& f, double lo, double hi, double x_tol, int max_iter) {
    double flo = f(lo);
    if (flo == 0.0) {
        return lo;
    }
    const double fhi = f(hi);
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw ThresholdAbsent("bisect: no sign change on bracket");
    }
    for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fm = f(mid);
        if (fm == 0.0) {
            return mid;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Minimum golden_section(const ScalarFn& f, double a, double b, double x_tol, int max_iter) {
    if (b < a) {
        std::swap(a, b);
    }
    const double fa = f(a);
    const double fb = f(b);
    if (b - a <= x_tol) {
        return fa <= fb ? Minimum{a, fa} : Minimum{b, fb};
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a;
    double hi = b;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    Minimum best = fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
    if (fa < best.value) {
        best = {a, fa};
    }
    if (fb < best.value) {
        best = {b, fb};
    }
    return best;
}

double richardson_derivative(const ScalarFn& f, double x, double h, double lower) {
    if (x - h >= lower) {
        const auto central = [&](double step) {
            return (f(x + step) - f(x - step)) / (2.0 * step);
        };
        return (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }
    // Second-order forward stencil, Richardson-extrapolated to fourth order.
    const auto forward = [&](double step) {
        return (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step);
    };
    return (4.0 * forward(0.5 * h) - forward(h)) / 3.0;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) {
        return {};
    }
    if (n == 1) {
        return {a};
    }
    std::vector<double> out(n);
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a + step * static_cast<double>(i);
    }
    out.back() = b;
    return out;
}

}  // namespace preventix::numerics
