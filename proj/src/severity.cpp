// SPDX-License-Identifier: MIT
#include "preventix/severity.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace preventix {

namespace {

// Below this tail level a quantile given in u = 1 - v has too few
// representable u values to integrate; the tail is continued as a power law.
constexpr double kQuantileTailLevel = 0x1p-20;

// Pieces at which integrands in s usually change character; splitting here
// keeps the first coarse Simpson pass from skipping structure.
const std::vector<double> kDefaultSBreaks = {0.5, 2.0, 5.0, 12.0, 25.0, 50.0, 100.0, 200.0};

}  // namespace

double integrate_exp_weighted(const std::function<double(double)>& f, double s_lo,
                              double s_hi, std::vector<double> s_breaks, double rel_tol) {
    if (s_hi <= s_lo) {
        return 0.0;
    }
    const auto g = [&f](double s) {
        const double w = std::exp(-s);
        if (w == 0.0) {
            return 0.0;
        }
        return f(s) * w;
    };
    s_breaks.insert(s_breaks.end(), kDefaultSBreaks.begin(), kDefaultSBreaks.end());
    const double mid = 0.5 * kSeverityMaxS;
    if (s_hi < kSeverityMaxS) {
        const double v = numerics::adaptive_simpson_split(g, s_lo, s_hi, s_breaks, rel_tol);
        if (!std::isfinite(v)) {
            throw InfiniteRiskMeasure("integral is not finite");
        }
        return v;
    }
    // Coarse look at the upper tail first: a divergent integrand grows
    // exponentially there and would stall the adaptive pass.
    const auto coarse = [&g](double a, double b, int n) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += std::abs(g(a + (b - a) * (i + 0.5) / n));
        }
        return sum * (b - a) / n;
    };
    const double rough_tail = coarse(std::max(s_lo, mid), s_hi, 64);
    const double rough_head = s_lo < mid ? coarse(s_lo, mid, 4096) : rough_tail;
    if (!std::isfinite(rough_tail) || rough_tail > 1e-3 * rough_head) {
        throw InfiniteRiskMeasure("integral does not converge in the upper tail");
    }
    const double head =
        s_lo < mid ? numerics::adaptive_simpson_split(g, s_lo, mid, s_breaks, rel_tol) : 0.0;
    const double tail = numerics::adaptive_simpson_split(g, std::max(s_lo, mid), s_hi,
                                                         s_breaks, rel_tol);
    const double total = head + tail;
    if (!std::isfinite(total) || std::abs(tail) > 1e-6 * std::max(std::abs(total), 1e-300)) {
        throw InfiniteRiskMeasure("integral does not converge in the upper tail");
    }
    return total;
}

Severity Severity::pareto(double xhat, double k) {
    if (!(xhat > 0.0) || !std::isfinite(xhat)) {
        throw ValidationError("pareto severity: xhat must be positive");
    }
    if (!(k > 2.0) || !std::isfinite(k)) {
        throw ValidationError("pareto severity: k must exceed 2 (second moment undefined)");
    }
    Severity s;
    s.family_ = Family::Pareto;
    s.name_ = "pareto";
    s.xhat_ = xhat;
    s.k_ = k;
    s.tail_q_ = std::make_shared<const std::function<double(double)>>(
        [xhat, k](double v) { return xhat * std::pow(v, -1.0 / k); });
    s.mean_ = xhat * k / (k - 1.0);
    s.second_moment_ = xhat * xhat * k / (k - 2.0);
    return s;
}

Severity Severity::from_tail_quantile(std::function<double(double)> tail_quantile,
                                      std::string name) {
    if (!tail_quantile) {
        throw ValidationError("generic severity: empty quantile function");
    }
    Severity s;
    s.family_ = Family::GenericQuantile;
    s.name_ = std::move(name);
    s.tail_q_ = std::make_shared<const std::function<double(double)>>(std::move(tail_quantile));
    s.init_generic_moments();
    return s;
}

Severity Severity::from_quantile(std::function<double(double)> quantile, std::string name) {
    if (!quantile) {
        throw ValidationError("generic severity: empty quantile function");
    }
    auto q = std::move(quantile);
    const double v0 = kQuantileTailLevel;
    const double q0 = q(1.0 - v0);
    const double q1 = q(1.0 - 4.0 * v0);
    const double xi = (q1 > 0.0 && q0 > q1) ? std::log(q0 / q1) / std::log(4.0) : 0.0;
    return from_tail_quantile(
        [q, q0, v0, xi](double v) { return v >= v0 ? q(1.0 - v) : q0 * std::pow(v / v0, -xi); },
        std::move(name));
}

void Severity::init_generic_moments() {
    const auto& q = *tail_q_;
    if (!(q(1.0) > 0.0)) {
        throw ValidationError("generic severity: lower support must be positive");
    }
    try {
        mean_ = integrate_exp_weighted([&q](double s) { return q(std::exp(-s)); }, 0.0,
                                       kSeverityMaxS, {});
        second_moment_ = integrate_exp_weighted(
            [&q](double s) {
                const double y = q(std::exp(-s));
                return y * y;
            },
            0.0, kSeverityMaxS, {});
    } catch (const InfiniteRiskMeasure&) {
        throw ValidationError("generic severity: second moment undefined");
    }
}

double Severity::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) {
        throw DomainError("quantile: u must lie in (0, 1)");
    }
    return tail_quantile(1.0 - u);
}

double Severity::tail_quantile(double v) const {
    if (!(v > 0.0 && v <= 1.0)) {
        throw DomainError("tail_quantile: v must lie in (0, 1]");
    }
    return (*tail_q_)(v);
}

double Severity::survival(double x) const {
    if (family_ == Family::Pareto) {
        return x <= xhat_ ? 1.0 : std::pow(xhat_ / x, k_);
    }
    const auto& q = *tail_q_;
    if (x <= q(1.0)) {
        return 1.0;
    }
    if (q(std::exp(-kSeverityMaxS)) <= x) {
        return 0.0;
    }
    // Bisection on s = -log S(x); 1e-12 in s is 1e-12 relative in S.
    double lo = 0.0;
    double hi = kSeverityMaxS;
    while (hi - lo > 1e-12 * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (q(std::exp(-mid)) < x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(-0.5 * (lo + hi));
}

double Severity::cdf(double x) const { return 1.0 - survival(x); }

double Severity::tail_integral(double a, double b) const {
    if (!(a >= 0.0 && b <= 1.0 && a <= b)) {
        throw DomainError("tail_integral: need 0 <= a <= b <= 1");
    }
    if (a == b) {
        return 0.0;
    }
    if (family_ == Family::Pareto) {
        const double e = 1.0 - 1.0 / k_;
        return mean_ * (std::pow(1.0 - a, e) - std::pow(1.0 - b, e));
    }
    const auto& q = *tail_q_;
    const double s_lo = -std::log1p(-a);
    const double s_hi = b == 1.0 ? kSeverityMaxS : -std::log1p(-b);
    return integrate_exp_weighted([&q](double s) { return q(std::exp(-s)); }, s_lo, s_hi, {});
}

double Severity::expect(const std::function<double(double)>& phi,
                        const std::vector<double>& kinks) const {
    const auto& q = *tail_q_;
    std::vector<double> breaks;
    for (double y : kinks) {
        const double sv = survival(y);
        if (sv > 0.0 && sv < 1.0) {
            breaks.push_back(-std::log(sv));
        }
    }
    return integrate_exp_weighted([&](double s) { return phi(q(std::exp(-s))); }, 0.0,
                                  kSeverityMaxS, breaks);
}

Severity Severity::scaled(double lambda) const {
    if (!(lambda > 0.0)) {
        throw DomainError("scaled: lambda must be positive");
    }
    if (family_ == Family::Pareto) {
        return pareto(lambda * xhat_, k_);
    }
    Severity s = *this;
    auto q = tail_q_;
    s.tail_q_ = std::make_shared<const std::function<double(double)>>(
        [q, lambda](double v) { return lambda * (*q)(v); });
    s.mean_ = lambda * mean_;
    s.second_moment_ = lambda * lambda * second_moment_;
    return s;
}

}  // namespace preventix
