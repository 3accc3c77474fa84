// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/inner_solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace preventix {

/// Non-fatal notes plus a failure flag raised when a result cannot be certified.
struct Diagnostics {
    std::vector<std::string> notes;
    bool failure = false;

    void note(std::string msg) { notes.push_back(std::move(msg)); }
    void fail(std::string msg) {
        failure = true;
        notes.push_back(std::move(msg));
    }
    void merge(const Diagnostics& other);
};

/// Which formula K takes on a piece of the effort axis.
enum class BranchKind {
    Null,      ///< alpha = 0: K = rho + c
    Interior,  ///< 0 < alpha < 1 moving with e
    Full,      ///< alpha = 1: K = p E[h(Y)] + c
    Frozen     ///< TVaR beyond e_beta with the interior alpha held constant
};

const char* to_string(BranchKind kind);

/// Effort interval [lo, hi] (hi may be +infinity) with a fixed branch.
struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    BranchKind kind = BranchKind::Null;
    /// Convex by theory; still verified numerically before use.
    bool convex = true;
};

struct BranchMinimum {
    Segment segment;
    double e = 0.0;
    double value = 0.0;
    /// "convex" (derivative bisection) or "grid" (scan and refine).
    std::string mode;
    /// Every local minimum found by a grid scan, as (e, K(e)).
    std::vector<std::pair<double, double>> local_minima;
};

struct Thresholds {
    std::optional<double> e_G1;
    std::optional<double> e_G2;
    std::optional<double> e_beta;
};

struct SolveResult {
    double e_star = 0.0;
    double alpha_star = 0.0;
    double objective = 0.0;
    ShareDecision::Branch branch = ShareDecision::Branch::Null;
    std::string case_label;
    Thresholds thresholds;
    std::vector<Segment> segments;
    std::vector<BranchMinimum> branch_minima;
    Diagnostics diagnostics;
};

/// K(e) = E[h(alpha* X_e)] - alpha* rho_g(X_e) + rho_g(X_e) + c(e).
double k_objective(const Scenario& sc, double e);

/// K restricted to one branch formula (defined for every e >= 0).
double branch_objective(const Scenario& sc, BranchKind kind, double e);

/// Case label, thresholds and the ordered branch segments covering [0, inf).
std::vector<Segment> decompose(const Scenario& sc, std::string& case_label,
                               Thresholds& thresholds, Diagnostics& diag);

/// Minimum of K over one segment. Convex segments use derivative-sign
/// bisection plus golden polish; others (or convex segments failing the
/// numeric convexity check) use a grid scan with local refinement.
BranchMinimum minimize_branch(const Scenario& sc, const Segment& segment, bool convexity_hint,
                              Diagnostics* diag = nullptr);

/// Globally optimal (e*, alpha*) for observable effort.
SolveResult solve(const Scenario& sc);

/// Numeric convexity of the risk term in e. For TVaR: second differences of
/// p(e) * integral_{beta(e)}^1 VaR_s(Y) ds on [0, e_beta] are >= -1e-8.
/// Otherwise: second differences of rho_g(X_e) on [0, 5 * gamma2].
bool check_risk_convexity(const Scenario& sc, int points = 1000);

}  // namespace preventix
