// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/moral_hazard.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace preventix {

/// One Monte-Carlo estimate against its closed-form reference.
struct McQuantity {
    double estimate = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
    /// |estimate - reference| <= 3 std_error.
    bool agrees = false;
};

struct McReport {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double e = 0.0;
    double alpha = 0.0;
    McQuantity mean;           ///< E[X_e]
    McQuantity premium;        ///< E[h(alpha X_e)]
    McQuantity weighted_loss;  ///< E[X_e h'(alpha X_e)]
    McQuantity tvar;           ///< TVaR_beta(X_e); only for TVaR measures
    bool has_tvar = false;
    bool agrees() const;
};

/// Deterministic uniform stream for task (seed, e, alpha): a seed_seq over
/// the seed and the bit patterns of e and alpha feeds std::mt19937_64, and
/// each draw maps the top 53 bits to [0, 1).
class TaskStream {
public:
    TaskStream(std::uint64_t seed, double e, double alpha);
    double uniform();

private:
    std::mt19937_64 engine_;
};

/// Bernoulli(p(e)) x inverse-transform severity sampling with 32 batch means.
/// n >= 10^4 and divisible into 32 batches (the remainder is dropped).
McReport mc_estimate(const Scenario& sc, double e, double alpha, std::size_t n,
                     std::uint64_t seed);

/// Mean of the top ceil((1 - beta) n) values of xs (xs is reordered).
double empirical_tvar(std::vector<double>& xs, double beta);

struct GridResult {
    double e = 0.0;
    double alpha = 0.0;
    double value = 0.0;
    double e_step = 0.0;
    double alpha_step = 0.0;
};

/// Coercivity bound c^{-1}(rho(X_0)): every minimiser of K lies below it.
double coercive_effort_bound(const Scenario& sc);

/// Direct minimisation of J(e, alpha) = E[h(alpha X_e)] - alpha rho + rho + c
/// on an e_steps x alpha_steps grid over [e_lo, e_hi] x [0, 1], followed by
/// two rounds of 10x re-gridding around the best few e-profile minima.
GridResult grid_search(const Scenario& sc, double e_lo, double e_hi, int e_steps = 512,
                       int alpha_steps = 512);

/// Moral-hazard variant: alpha is pinned to H(e) on every admissible column
/// and the (0, 1) corner is a candidate.
GridResult grid_search_moral_hazard(const Scenario& sc, int e_steps = 4096);

enum class DerivativeQuantity { Rho, K, L };

struct DerivativeReport {
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
    bool inconclusive = false;
    bool agrees = false;
    std::string note;
};

/// Richardson central differences at steps {1e-4, 1e-5} * scale against the
/// analytic derivative. Within 1e-3 * scale of a breakpoint the result is
/// inconclusive.
DerivativeReport derivative_check(const Scenario& sc, double e, DerivativeQuantity quantity,
                                  double rel_tol = 1e-6);

}  // namespace preventix
