// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/severity.hpp"

#include <functional>
#include <string>
#include <vector>

namespace preventix {

/// Effort-dependent loss probability p(e).
class LossProbability {
public:
    enum class Family { Hyperbolic, Custom };

    /// p(e) = gamma1 / (gamma2 + e) with 0 < gamma1 < gamma2.
    static LossProbability hyperbolic(double gamma1, double gamma2);

    /// User-supplied p and p'. Limits at infinity are declared by the caller
    /// and only the declared values are trusted.
    static LossProbability custom(std::function<double(double)> p,
                                  std::function<double(double)> p_prime,
                                  double limit_at_infinity = 0.0,
                                  std::string name = "custom");

    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    double gamma1() const { return gamma1_; }
    double gamma2() const { return gamma2_; }
    double limit_at_infinity() const { return limit_; }

    double operator()(double e) const;
    double prime(double e) const;
    double at_zero() const { return (*this)(0.0); }

    /// Smallest e >= 0 with p(e) <= level; 0 when p(0) <= level.
    double inverse(double level) const;

    /// Characteristic effort scale used for grids and tolerances.
    double effort_scale() const;

private:
    LossProbability() = default;

    Family family_ = Family::Hyperbolic;
    std::string name_;
    double gamma1_ = 0.0;
    double gamma2_ = 1.0;
    double limit_ = 0.0;
    std::function<double(double)> p_;
    std::function<double(double)> p_prime_;
};

/// Effort cost c(e).
class EffortCost {
public:
    enum class Family { Quadratic, Custom };

    /// c(e) = kappa * e^2, kappa > 0.
    static EffortCost quadratic(double kappa);

    static EffortCost custom(std::function<double(double)> c,
                             std::function<double(double)> c_prime,
                             std::string name = "custom");

    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    double kappa() const { return kappa_; }

    double operator()(double e) const;
    double prime(double e) const;
    /// Smallest e >= 0 with c(e) >= level.
    double inverse(double level) const;

private:
    EffortCost() = default;

    Family family_ = Family::Quadratic;
    std::string name_;
    double kappa_ = 0.0;
    std::function<double(double)> c_;
    std::function<double(double)> c_prime_;
};

/// One line of a numeric assumption check.
struct AssumptionCheck {
    std::string assumption;  ///< stable identifier, e.g. "loss_probability"
    std::string property;    ///< what was tested
    bool passed = true;
    bool fatal = false;      ///< a failure is an error rather than a warning
    std::string detail;
};

using ValidationReport = std::vector<AssumptionCheck>;

/// True when any check in the report failed fatally.
bool has_fatal(const ValidationReport& report);

/// Loss probability and cost of effort.
struct Prevention {
    LossProbability p;
    EffortCost cost;

    /// Grid-based checks of the probability and cost assumptions on
    /// 1000 points of [0, 10 * effort_scale]; limits are checked per family.
    ValidationReport validate() const;
};

/// The mixture X_e = 0 with probability 1 - p(e), and Y otherwise.
struct MixtureLoss {
    Prevention prevention;
    Severity severity;

    double p(double e) const { return prevention.p(e); }
    double p_prime(double e) const { return prevention.p.prime(e); }
    double cost(double e) const { return prevention.cost(e); }
    double cost_prime(double e) const { return prevention.cost.prime(e); }

    /// Effort at which p(e) = 1 - beta, or 0 when p(0) <= 1 - beta.
    double e_beta(double beta) const;

    double mean(double e) const { return p(e) * severity.mean(); }
    double survival(double e, double x) const;
};

/// Checks S_{X_e1}(x) >= S_{X_e2}(x) on a log-spaced x-grid of grid_size points.
bool fsd_check(const MixtureLoss& mixture, double e1, double e2, int grid_size = 200);

}  // namespace preventix
