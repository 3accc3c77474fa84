// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace preventix {

/// Strictly positive loss severity Y, described by its quantile function.
///
/// Two families exist: a closed-form Pareto law F(y) = 1 - (xhat / y)^k for
/// y >= xhat, and a generic law given by a quantile function. Generic
/// integrals run in s = -log(1 - u) coordinates so that heavy upper tails are
/// integrated without truncating the probability axis.
class Severity {
public:
    enum class Family { Pareto, GenericQuantile };

    /// Pareto law with scale xhat > 0 and shape k > 2.
    static Severity pareto(double xhat, double k);

    /// Generic law from the tail quantile v -> F^{-1}(1 - v), v in (0, 1].
    /// Preferred over from_quantile: it keeps full precision as v -> 0.
    static Severity from_tail_quantile(std::function<double(double)> tail_quantile,
                                       std::string name = "generic");

    /// Generic law from the ordinary quantile u -> F^{-1}(u), u in [0, 1).
    /// u near 1 is too coarsely representable to integrate against, so beyond
    /// u = 1 - 2^-20 the tail continues as the power law through the quantiles
    /// at 1 - 2^-20 and 1 - 2^-18 (exact for Pareto tails).
    static Severity from_quantile(std::function<double(double)> quantile,
                                  std::string name = "generic");

    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    double xhat() const { return xhat_; }
    double k() const { return k_; }

    /// F^{-1}(u) for u in (0, 1). u == 0 returns the lower support point.
    double quantile(double u) const;
    /// F^{-1}(1 - v) for v in (0, 1].
    double tail_quantile(double v) const;
    double cdf(double x) const;
    double survival(double x) const;
    double lower_support() const { return tail_quantile(1.0); }

    double mean() const { return mean_; }
    double second_moment() const { return second_moment_; }

    /// Integral of F^{-1}(s) over s in [a, b], 0 <= a <= b <= 1.
    double tail_integral(double a, double b) const;

    /// E[phi(Y)]. kinks lists severity values where phi is not smooth.
    double expect(const std::function<double(double)>& phi,
                  const std::vector<double>& kinks = {}) const;

    /// Law of lambda * Y for lambda > 0.
    Severity scaled(double lambda) const;

    /// Inverse-transform draw from a uniform u in [0, 1).
    double sample(double u) const { return tail_quantile(1.0 - u); }

private:
    Severity() = default;
    void init_generic_moments();

    Family family_ = Family::Pareto;
    std::string name_;
    double xhat_ = 0.0;
    double k_ = 0.0;
    std::shared_ptr<const std::function<double(double)>> tail_q_;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
};

/// Upper limit of the s = -log(1 - u) axis used by generic quadrature.
inline constexpr double kSeverityMaxS = 700.0;

/// Integral of f(s) * exp(-s) over [s_lo, s_hi], split at s_breaks, with a
/// divergence check that compares the integral up to s_hi / 2 and up to s_hi.
/// Throws InfiniteRiskMeasure when the tail does not settle.
double integrate_exp_weighted(const std::function<double(double)>& f, double s_lo,
                              double s_hi, std::vector<double> s_breaks,
                              double rel_tol = 1e-12);

}  // namespace preventix
