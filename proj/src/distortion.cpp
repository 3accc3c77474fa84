// SPDX-License-Identifier: MIT
#include "preventix/distortion.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace preventix {

namespace {

constexpr int kStieltjesCells = 2000;
constexpr double kStieltjesMaxS = 60.0;

void check_effort(double e) {
    if (!(e >= 0.0)) {
        throw DomainError("effort must be non-negative");
    }
}

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("beta must lie in (0, 1)");
    }
}

double finite_difference_rho(const DistortionMeasure& m, const MixtureLoss& mix, double e) {
    const double h = 1e-4 * std::max(1.0, e);
    return numerics::richardson_derivative([&](double x) { return rho_general(m, mix, x); }, e, h,
                                           0.0);
}

}  // namespace

DistortionMeasure DistortionMeasure::tvar(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw ValidationError("tvar: beta must lie in (0, 1)");
    }
    DistortionMeasure m;
    m.kind_ = Kind::TVaR;
    m.name_ = "tvar";
    m.param_ = beta;
    m.kinks_ = {1.0 - beta};
    m.concave_ = true;
    m.strictly_concave_ = false;
    return m;
}

DistortionMeasure DistortionMeasure::power(double r) {
    if (!(r > 0.0 && r <= 1.0)) {
        throw ValidationError("power distortion: r must lie in (0, 1]");
    }
    DistortionMeasure m;
    m.kind_ = Kind::Power;
    m.name_ = "power";
    m.param_ = r;
    m.concave_ = true;
    m.strictly_concave_ = r < 1.0;
    return m;
}

DistortionMeasure DistortionMeasure::generic(std::function<double(double)> g,
                                             std::function<double(double)> g_prime,
                                             std::vector<double> kinks, std::string name) {
    if (!g) {
        throw ValidationError("generic distortion: g is required");
    }
    if (std::abs(g(0.0)) > 1e-12 || std::abs(g(1.0) - 1.0) > 1e-12) {
        throw ValidationError("generic distortion: need g(0) = 0 and g(1) = 1");
    }
    DistortionMeasure m;
    m.kind_ = Kind::Generic;
    m.name_ = std::move(name);
    m.g_ = std::move(g);
    m.g_prime_ = std::move(g_prime);
    m.kinks_ = std::move(kinks);
    std::sort(m.kinks_.begin(), m.kinks_.end());

    const auto grid = numerics::linspace(0.0, 1.0, 2001);
    bool strict = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (m.g_(grid[i]) < m.g_(grid[i - 1]) - 1e-14) {
            throw ValidationError("generic distortion: g must be non-decreasing");
        }
        if (i + 1 < grid.size()) {
            const double d2 = m.g_(grid[i + 1]) - 2.0 * m.g_(grid[i]) + m.g_(grid[i - 1]);
            if (d2 > 1e-12) {
                m.concave_ = false;
            }
            if (!(d2 < 0.0)) {
                strict = false;
            }
        }
    }
    m.strictly_concave_ = m.concave_ && strict;
    return m;
}

double DistortionMeasure::g(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError("distortion: argument must lie in [0, 1]");
    }
    switch (kind_) {
        case Kind::TVaR:
            return std::min(1.0, u / (1.0 - param_));
        case Kind::Power:
            return std::pow(u, param_);
        case Kind::Generic:
            break;
    }
    return g_(u);
}

double DistortionMeasure::g_prime(double u) const {
    switch (kind_) {
        case Kind::TVaR:
            return u < 1.0 - param_ ? 1.0 / (1.0 - param_) : 0.0;
        case Kind::Power:
            return param_ * std::pow(u, param_ - 1.0);
        case Kind::Generic:
            break;
    }
    if (!g_prime_) {
        throw PreconditionError("distortion: g' not supplied");
    }
    return g_prime_(u);
}

std::string DistortionMeasure::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::TVaR:
            os << "tvar(beta=" << param_ << ")";
            break;
        case Kind::Power:
            os << "power(r=" << param_ << ")";
            break;
        case Kind::Generic:
            os << "generic(" << name_ << ")";
            break;
    }
    return os.str();
}

double var_mixture(const MixtureLoss& mixture, double e, double beta) {
    check_effort(e);
    check_beta(beta);
    const double p = mixture.p(e);
    if (beta <= 1.0 - p) {
        return 0.0;
    }
    return mixture.severity.quantile((beta + p - 1.0) / p);
}

double tvar_mixture(const MixtureLoss& mixture, double e, double beta) {
    check_effort(e);
    check_beta(beta);
    const double p = mixture.p(e);
    const Severity& y = mixture.severity;
    if (p <= 1.0 - beta) {
        return p * y.mean() / (1.0 - beta);
    }
    if (y.family() == Severity::Family::Pareto) {
        return y.mean() * std::pow(p / (1.0 - beta), 1.0 / y.k());
    }
    const double level = (beta + p - 1.0) / p;
    return p / (1.0 - beta) * y.tail_integral(level, 1.0);
}

double rho_power_mixture(const MixtureLoss& mixture, double e, double r) {
    check_effort(e);
    const Severity& y = mixture.severity;
    if (y.family() == Severity::Family::Pareto) {
        const double kr = y.k() * r;
        if (!(kr > 1.0)) {
            throw InfiniteRiskMeasure("power distortion: k * r <= 1, risk measure is infinite");
        }
        return r * y.xhat() * y.k() / (kr - 1.0) * std::pow(mixture.p(e), r);
    }
    return rho_general(DistortionMeasure::power(r), mixture, e);
}

double rho_general(const DistortionMeasure& measure, const MixtureLoss& mixture, double e) {
    check_effort(e);
    const double p = mixture.p(e);
    const Severity& y = mixture.severity;
    if (measure.has_derivative()) {
        // With u = p t and t = exp(-s):
        // rho = integral over s of F^{-1}(1 - t) g'(p t) p t ds.
        std::vector<double> breaks;
        for (double kink : measure.kinks()) {
            if (kink > 0.0 && kink < p) {
                breaks.push_back(std::log(p / kink));
            }
        }
        if (measure.kind() == DistortionMeasure::Kind::Power) {
            // Fold u^(r-1) into the weight to avoid overflow deep in the tail.
            const double r = measure.r();
            const double scale = r * std::pow(p, r);
            return integrate_exp_weighted(
                [&](double s) {
                    return y.tail_quantile(std::exp(-s)) * scale * std::exp((1.0 - r) * s);
                },
                0.0, kSeverityMaxS, breaks);
        }
        return integrate_exp_weighted(
            [&](double s) {
                const double t = std::exp(-s);
                return y.tail_quantile(t) * measure.g_prime(p * t) * p;
            },
            0.0, kSeverityMaxS, breaks);
    }
    // Riemann-Stieltjes sum over a partition uniform in s.
    const double ds = kStieltjesMaxS / kStieltjesCells;
    double total = 0.0;
    for (int i = 0; i < kStieltjesCells; ++i) {
        const double s0 = ds * i;
        const double s1 = s0 + ds;
        const double dg = measure.g(p * std::exp(-s0)) - measure.g(p * std::exp(-s1));
        total += y.tail_quantile(std::exp(-(s0 + 0.5 * ds))) * dg;
    }
    const double t_end = std::exp(-kStieltjesMaxS);
    total += y.tail_quantile(t_end) * measure.g(p * t_end);
    if (!std::isfinite(total)) {
        throw InfiniteRiskMeasure("risk measure is not finite");
    }
    return total;
}

double rho(const DistortionMeasure& measure, const MixtureLoss& mixture, double e) {
    switch (measure.kind()) {
        case DistortionMeasure::Kind::TVaR:
            return tvar_mixture(mixture, e, measure.beta());
        case DistortionMeasure::Kind::Power:
            return rho_power_mixture(mixture, e, measure.r());
        case DistortionMeasure::Kind::Generic:
            break;
    }
    return rho_general(measure, mixture, e);
}

OneSided rho_prime(const DistortionMeasure& measure, const MixtureLoss& mixture, double e) {
    check_effort(e);
    const Severity& y = mixture.severity;
    const double p = mixture.p(e);
    const double dp = mixture.p_prime(e);
    switch (measure.kind()) {
        case DistortionMeasure::Kind::TVaR: {
            const double beta = measure.beta();
            const double upper = y.mean() * dp / (1.0 - beta);
            const double eb = mixture.e_beta(beta);
            const auto lower = [&]() {
                const double level = std::max(0.0, (beta + p - 1.0) / p);
                return dp / (1.0 - beta) * y.tail_integral(level, 1.0) -
                       dp / p * y.quantile(level);
            };
            if (eb > 0.0 && e == eb) {
                return {lower(), upper};
            }
            if (e < eb) {
                const double v = lower();
                return {v, v};
            }
            return {upper, upper};
        }
        case DistortionMeasure::Kind::Power:
            if (y.family() == Severity::Family::Pareto) {
                const double r = measure.r();
                const double d = r * rho_power_mixture(mixture, e, r) / p * dp;
                return {d, d};
            }
            break;
        case DistortionMeasure::Kind::Generic:
            break;
    }
    const double d = finite_difference_rho(measure, mixture, e);
    return {d, d};
}

}  // namespace preventix
