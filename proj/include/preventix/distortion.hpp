// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/prevention.hpp"

#include <functional>
#include <string>
#include <vector>

namespace preventix {

/// Distortion risk measure rho_g(Z) = integral of g(S_Z(t)) dt.
class DistortionMeasure {
public:
    enum class Kind { TVaR, Power, Generic };

    /// g(u) = min(1, u / (1 - beta)), beta in (0, 1).
    static DistortionMeasure tvar(double beta);
    /// g(u) = u^r, r in (0, 1].
    static DistortionMeasure power(double r);
    /// Arbitrary distortion. g_prime may be empty, in which case rho is
    /// evaluated by a Riemann-Stieltjes sum. kinks are points of (0, 1)
    /// where g is not differentiable.
    static DistortionMeasure generic(std::function<double(double)> g,
                                     std::function<double(double)> g_prime = {},
                                     std::vector<double> kinks = {},
                                     std::string name = "generic");

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double beta() const { return param_; }
    double r() const { return param_; }

    double g(double u) const;
    bool has_derivative() const { return kind_ != Kind::Generic || static_cast<bool>(g_prime_); }
    /// g'(u), right derivative at kinks.
    double g_prime(double u) const;
    const std::vector<double>& kinks() const { return kinks_; }

    bool concave() const { return concave_; }
    bool strictly_concave() const { return strictly_concave_; }

    std::string describe() const;

private:
    DistortionMeasure() = default;

    Kind kind_ = Kind::TVaR;
    std::string name_;
    double param_ = 0.0;
    std::function<double(double)> g_;
    std::function<double(double)> g_prime_;
    std::vector<double> kinks_;
    bool concave_ = true;
    bool strictly_concave_ = false;
};

/// VaR_beta(X_e): 0 when beta <= 1 - p(e), else F_Y^{-1}((beta + p - 1) / p).
double var_mixture(const MixtureLoss& mixture, double e, double beta);

/// TVaR_beta(X_e), analytic branches around e_beta.
double tvar_mixture(const MixtureLoss& mixture, double e, double beta);

/// rho for g(u) = u^r. Pareto severity uses the closed form and throws
/// InfiniteRiskMeasure when k r <= 1.
double rho_power_mixture(const MixtureLoss& mixture, double e, double r);

/// rho_g(X_e) by quadrature of the Stieltjes form, valid for every kind.
double rho_general(const DistortionMeasure& measure, const MixtureLoss& mixture, double e);

/// rho_g(X_e) using the fastest exact route for the measure.
double rho(const DistortionMeasure& measure, const MixtureLoss& mixture, double e);

/// One-sided derivatives of e -> rho_g(X_e). They differ only at a kink
/// such as e_beta for TVaR.
struct OneSided {
    double left;
    double right;
};

OneSided rho_prime(const DistortionMeasure& measure, const MixtureLoss& mixture, double e);

}  // namespace preventix
