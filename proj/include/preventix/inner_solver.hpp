// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/distortion.hpp"
#include "preventix/premium.hpp"
#include "preventix/prevention.hpp"

#include <string>

namespace preventix {

/// Solver tolerances and grid sizes. Defaults are the documented ones.
struct SolverOptions {
    /// Upper bound of the concave-distortion threshold search; <= 0 means
    /// 100 * gamma2.
    double e_max = 0.0;
    /// Points of the scan over a possibly non-convex branch.
    int interior_grid = 512;
    /// Relative effort tolerance (times the scenario scale).
    double effort_tol = 1e-9;
    /// Points per piece of the moral-hazard scan.
    int moral_hazard_grid = 1024;
    /// Root tolerance on alpha for the bisection path.
    double alpha_tol = 1e-12;
};

/// The tuple (X_e, h, g) that every solver consumes.
struct Scenario {
    MixtureLoss mixture;
    Premium premium;
    DistortionMeasure measure;
    SolverOptions options;

    double p(double e) const { return mixture.p(e); }
    double rho(double e) const { return preventix::rho(measure, mixture, e); }
    OneSided rho_prime(double e) const { return preventix::rho_prime(measure, mixture, e); }
    bool is_tvar() const { return measure.kind() == DistortionMeasure::Kind::TVaR; }
    /// e_beta for TVaR, 0 otherwise.
    double e_beta() const;
    /// max(1, e_beta, gamma2), the scale of every effort tolerance.
    double scale() const;
    /// Effective upper bound of the concave-distortion threshold search.
    double e_max() const;
};

struct ShareDecision {
    enum class Branch { Null, Interior, Full };
    double alpha = 0.0;
    Branch branch = Branch::Null;
    double g1 = 0.0;
    double g2 = 0.0;
};

const char* to_string(ShareDecision::Branch branch);

/// G1(e) = rho_g(X_e) / E[X_e].
double g1(const Scenario& sc, double e);
/// G2(e) = rho_g(X_e) / E[X_e h'(X_e)].
double g2(const Scenario& sc, double e);

/// Unique alpha in (0, 1) with E[X_e h'(alpha X_e)] = rho_g(X_e).
/// Throws PreconditionError outside the interior bracket.
double solve_alpha_h(const Scenario& sc, double e);

/// Root of E[Y h'(alpha Y)] = psi by the closed form (quadratic h) or by
/// bisection. The bisect flag forces the bisection path.
double alpha_for_psi(const Premium& pp, const Severity& y, double psi, double alpha_tol,
                     bool bisect = false);

/// Optimal share for fixed effort: Full when G2 >= 1, Null when G1 <= h'(0),
/// interior root otherwise.
ShareDecision optimal_share(const Scenario& sc, double e);

/// Case label: "TVaR-i" ... "TVaR-vi" or "DRM-i" ... "DRM-iii".
std::string classify_case(const Scenario& sc);

/// Root of G1(e) = h'(0) on [0, e_beta] (TVaR) or [0, e_max] (other measures).
double solve_e_G1(const Scenario& sc);
/// Root of G2(e) = 1 on the same interval.
double solve_e_G2(const Scenario& sc);

}  // namespace preventix
