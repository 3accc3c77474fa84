// SPDX-License-Identifier: MIT
#include "preventix/inner_solver.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace preventix {

namespace {

double effort_probability(const Scenario& sc, double e) {
    const double p = sc.p(e);
    if (!(p > 1e-300)) {
        throw DegenerateEffort("loss probability vanished numerically");
    }
    return p;
}

double threshold_root(const Scenario& sc, const numerics::ScalarFn& residual, const char* what) {
    const double hi = sc.is_tvar() ? sc.e_beta() : sc.e_max();
    const double r_lo = residual(0.0);
    const double r_hi = residual(hi);
    if (r_lo > 0.0 || r_hi < 0.0) {
        throw ThresholdAbsent(std::string(what) + ": no crossing on the search interval");
    }
    if (hi == 0.0) {
        return 0.0;
    }
    const double tol = 1e-10 * std::max(1.0, sc.is_tvar() ? sc.e_beta() : 1.0);
    return numerics::bisect(residual, 0.0, hi, tol);
}

}  // namespace

double Scenario::e_beta() const {
    return is_tvar() ? mixture.e_beta(measure.beta()) : 0.0;
}

double Scenario::scale() const {
    return std::max({1.0, e_beta(), mixture.prevention.p.effort_scale()});
}

double Scenario::e_max() const {
    return options.e_max > 0.0 ? options.e_max : 100.0 * mixture.prevention.p.effort_scale();
}

const char* to_string(ShareDecision::Branch branch) {
    switch (branch) {
        case ShareDecision::Branch::Null:
            return "null";
        case ShareDecision::Branch::Interior:
            return "interior";
        case ShareDecision::Branch::Full:
            return "full";
    }
    return "?";
}

double g1(const Scenario& sc, double e) {
    const double p = effort_probability(sc, e);
    return sc.rho(e) / (p * sc.mixture.severity.mean());
}

double g2(const Scenario& sc, double e) {
    const double p = effort_probability(sc, e);
    return sc.rho(e) / (p * sc.premium.expected_y_h_prime(sc.mixture.severity, 1.0));
}

double alpha_for_psi(const Premium& pp, const Severity& y, double psi, double alpha_tol,
                     bool bisect) {
    if (!bisect && pp.family() == Premium::Family::Quadratic && pp.theta2() > 0.0) {
        const double a =
            (psi - (1.0 + pp.theta1()) * y.mean()) / (2.0 * pp.theta2() * y.second_moment());
        return std::clamp(a, 0.0, 1.0);
    }
    const auto residual = [&](double a) { return pp.expected_y_h_prime(y, a) - psi; };
    if (residual(0.0) >= 0.0) {
        return 0.0;
    }
    if (residual(1.0) <= 0.0) {
        return 1.0;
    }
    // The residual is non-decreasing in alpha; bisect on its sign.
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > alpha_tol) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double solve_alpha_h(const Scenario& sc, double e) {
    const double p = effort_probability(sc, e);
    const double r = sc.rho(e);
    const Severity& y = sc.mixture.severity;
    const double lower = sc.premium.h_prime_at_zero() * y.mean();
    const double upper = sc.premium.expected_y_h_prime(y, 1.0);
    const double psi = r / p;
    if (!(psi > lower && psi < upper)) {
        throw PreconditionError("solve_alpha_h: effort is outside the interior bracket");
    }
    return alpha_for_psi(sc.premium, y, psi, sc.options.alpha_tol);
}

ShareDecision optimal_share(const Scenario& sc, double e) {
    const double p = effort_probability(sc, e);
    const double r = sc.rho(e);
    const Severity& y = sc.mixture.severity;
    const double mean = y.mean();
    const double full = sc.premium.expected_y_h_prime(y, 1.0);
    ShareDecision d;
    d.g1 = r / (p * mean);
    d.g2 = r / (p * full);
    if (d.g2 >= 1.0) {
        d.alpha = 1.0;
        d.branch = ShareDecision::Branch::Full;
    } else if (d.g1 <= sc.premium.h_prime_at_zero()) {
        d.alpha = 0.0;
        d.branch = ShareDecision::Branch::Null;
    } else {
        d.alpha = alpha_for_psi(sc.premium, y, r / p, sc.options.alpha_tol);
        d.branch = ShareDecision::Branch::Interior;
    }
    return d;
}

std::string classify_case(const Scenario& sc) {
    const double h0 = sc.premium.h_prime_at_zero();
    if (sc.is_tvar()) {
        const double eb = sc.e_beta();
        const double g1_0 = g1(sc, 0.0);
        const double g2_0 = g2(sc, 0.0);
        const double g1_b = g1(sc, eb);
        const double g2_b = g2(sc, eb);
        if (g1_0 > h0) {
            if (g2_0 > 1.0) {
                return "TVaR-i";
            }
            return g2_b >= 1.0 ? "TVaR-ii" : "TVaR-iii";
        }
        if (g1_b < h0) {
            return "TVaR-vi";
        }
        return g2_b >= 1.0 ? "TVaR-iv" : "TVaR-v";
    }
    if (!sc.measure.concave()) {
        throw UnsupportedMeasure("case classification needs a concave distortion");
    }
    if (g1(sc, 0.0) > h0) {
        return g2(sc, 0.0) > 1.0 ? "DRM-i" : "DRM-ii";
    }
    return "DRM-iii";
}

double solve_e_G1(const Scenario& sc) {
    const double h0 = sc.premium.h_prime_at_zero();
    return threshold_root(sc, [&](double e) { return g1(sc, e) - h0; }, "solve_e_G1");
}

double solve_e_G2(const Scenario& sc) {
    return threshold_root(sc, [&](double e) { return g2(sc, e) - 1.0; }, "solve_e_G2");
}

}  // namespace preventix
