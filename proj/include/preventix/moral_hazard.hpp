// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/outer_solver.hpp"

#include <utility>
#include <vector>

namespace preventix {

/// Closed effort interval.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct MoralHazardResult {
    double e_star = 0.0;
    double alpha_star = 1.0;
    double objective = 0.0;
    /// End of the first admissible interval; 0 when B is empty.
    double e_B = 0.0;
    bool corner_taken = true;
    /// Admissible efforts {e > 0 : c'(e) + rho'(e) <= 0} as disjoint intervals.
    std::vector<Interval> admissible;
    /// Local minima of L found by the scan, as (e, L(e)), ascending in L.
    std::vector<std::pair<double, double>> candidates;
    /// (1 - alpha*) rho'(e*) + c'(e*), scaled by |c'(e*)| + |rho'(e*)|.
    double foc_residual = 0.0;
    Diagnostics diagnostics;
};

/// H(e) = 1 + c'(e) / rho'(e): the share that makes e a stationary point of
/// the insured's own problem. H(0) = 1. Uses the right derivative of rho.
double incentive_share(const Scenario& sc, double e);

/// Same as incentive_share with the left derivative of rho (differs only at
/// a kink such as e_beta).
double incentive_share_left(const Scenario& sc, double e);

/// Closed form of H for TVaR, Pareto severity, hyperbolic p and quadratic
/// cost. Throws UnsupportedMeasure for other scenarios.
double incentive_share_closed_form(const Scenario& sc, double e);

/// Admissible set as sorted disjoint intervals. Sign changes of c' + rho'
/// are scanned on each smooth piece (split at e_beta for TVaR) and bisected.
std::vector<Interval> admissible_set(const Scenario& sc, Diagnostics* diag = nullptr);

/// End of the first admissible interval. Throws SolverFailure if B is empty.
double solve_e_B(const Scenario& sc);

/// L(e) = rho(X_e)(1 - H) + E[h(H X_e)] + c(e), with L(0) = E[h(X_0)].
/// Throws PreconditionError when H(e) falls outside [0, 1].
double constrained_objective(const Scenario& sc, double e);

/// f(b) = (1 - alpha) rho(X_b) + c(b), the insured's own objective.
double incentive_objective(const Scenario& sc, double alpha, double b);

/// Grid argmin of f on [0, 4 e_B] with step max(1e-3, 4 e_B / 4096).
double incentive_argmin(const Scenario& sc, double alpha, double e_B);

/// Global minimiser of L over {0} and B, compared against the (0, 1) corner.
MoralHazardResult solve_moral_hazard(const Scenario& sc);

}  // namespace preventix
