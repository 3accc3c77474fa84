// SPDX-License-Identifier: MIT
// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "preventix/error.hpp"
#include "preventix/moral_hazard.hpp"
#include "preventix/oracle.hpp"
#include "preventix/outer_solver.hpp"
#include "preventix/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace preventix;

namespace {

// Tolerances and budgets.
constexpr double kThetaTol = 0.002;           // AC1, AC2, AC4
constexpr double kBetaTol = 0.001;            // AC3
constexpr double kEBTol = 1e-4;               // AC5
constexpr double kShareTol = 1e-12;           // alpha == 0 / 1 checks
constexpr double kMonotoneTol = 1e-7;         // AC8 sweep monotonicity, relative
constexpr double kUnimodalTol = 1e-8;         // AC7 e* shape, relative
constexpr double kOracleRelTol = 1e-6;        // AC9
constexpr double kMcSigmas = 3.0;             // AC10
constexpr double kContinuityTol = 1e-6;       // AC11 K jumps, relative
constexpr double kBudgetAC1 = 1.0;            // seconds
constexpr double kBudgetAC6 = 30.0;
constexpr double kBudgetAC9 = 300.0;
constexpr std::uint64_t kRandomSeed = 20240611;

std::string fixture(const std::string& name) {
    return std::string(PREVENTIX_FIXTURE_DIR) + "/" + name + ".json";
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("AC%-2d %s  %s: %s [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", title.c_str(),
                o.detail.c_str(), dt);
    std::fflush(stdout);
    if (!o.pass) {
        ++failures;
    }
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

// Matches computed partition thresholds to the expected list in order.
Outcome thresholds(const std::string& name, const std::vector<double>& expected, double tol,
                   double budget = 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto th = partition_thresholds(load(fixture(name)));
    const double dt = elapsed(t0);
    std::ostringstream os;
    if (th.size() != expected.size()) {
        os << "found " << th.size() << " thresholds, expected " << expected.size();
        return {false, os.str()};
    }
    double worst = 0.0;
    os << "{";
    for (std::size_t i = 0; i < th.size(); ++i) {
        worst = std::max(worst, std::abs(th[i].value - expected[i]));
        os << (i ? ", " : "") << fmt(th[i].value, 7);
    }
    os << "} max|d|=" << fmt(worst, 3) << " (tol " << tol << ")";
    bool ok = worst <= tol;
    if (budget > 0.0) {
        os << ", " << fmt(dt, 3) << " s (budget " << budget << " s)";
        ok = ok && dt < budget;
    }
    return {ok, os.str()};
}

double value_of(const SweepRow& r) { return *r.value; }

bool any_failure(const std::vector<SweepRow>& rows, std::string& why) {
    for (const SweepRow& r : rows) {
        if (r.failure) {
            why = "diagnostic failure at index " + std::to_string(r.index) +
                  (r.notes.empty() ? "" : ": " + r.notes.back());
            return true;
        }
    }
    return false;
}

std::size_t argmax_e(const std::vector<SweepRow>& rows) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].e_star > rows[best].e_star) {
            best = i;
        }
    }
    return best;
}

double threshold(const std::vector<PartitionThreshold>& th, const std::string& criterion) {
    for (const auto& t : th) {
        if (t.criterion == criterion) {
            return t.value;
        }
    }
    return NAN;
}

// Complementarity on one sweep: case labels change only across computed
// thresholds, alpha* = 1 below the G2(0) = 1 threshold, alpha* is
// non-increasing, e* is unimodal, and alpha* leaves 1 within one grid step of
// the e* peak, so both rise (or hold) together and then fall together.
Outcome complementarity(const std::string& name) {
    const ScenarioConfig cfg = load(fixture(name));
    const auto rows = run_sweep(cfg, Mode::Sweep);
    std::string why;
    if (any_failure(rows, why)) {
        return {false, name + ": " + why};
    }
    const auto th = partition_thresholds(cfg);
    const double t_full = threshold(th, "G2(0)=1");
    const std::size_t peak = argmax_e(rows);
    const double scale = rows[peak].e_star;
    std::size_t first_partial = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double v = value_of(rows[i]);
        if (first_partial == rows.size() && rows[i].alpha_star < 1.0 - kShareTol) {
            first_partial = i;
        }
        if (v < t_full && rows[i].alpha_star < 1.0 - kShareTol) {
            return {false, name + ": partial cover below the threshold " + fmt(t_full) + " at " + fmt(v)};
        }
        if (i == 0) {
            continue;
        }
        const double de = rows[i].e_star - rows[i - 1].e_star;
        if (i <= peak && de < -kUnimodalTol * scale) {
            return {false, name + ": e* falls before its peak at " + fmt(v)};
        }
        if (i > peak && de > kUnimodalTol * scale) {
            return {false, name + ": e* rises after its peak at " + fmt(v)};
        }
        if (rows[i].alpha_star > rows[i - 1].alpha_star + kShareTol) {
            return {false, name + ": alpha* rises at " + fmt(v)};
        }
        if (rows[i].case_label != rows[i - 1].case_label) {
            const double lo = value_of(rows[i - 1]);
            const bool explained = std::any_of(th.begin(), th.end(), [&](const PartitionThreshold& t) {
                return t.value > lo && t.value <= v;
            });
            if (!explained) {
                return {false, name + ": case changes to " + rows[i].case_label + " at " + fmt(v) +
                                   " with no threshold in (" + fmt(lo) + ", " + fmt(v) + "]"};
            }
        }
    }
    // A flat top (alpha* = 1 makes e* independent of r) ends at its last point.
    std::size_t top_end = peak;
    while (top_end + 1 < rows.size() && rows[top_end + 1].e_star >= scale * (1.0 - kUnimodalTol)) {
        ++top_end;
    }
    if (first_partial == rows.size() || first_partial + 1 < top_end || first_partial > top_end + 1) {
        return {false, name + ": alpha* leaves 1 away from the e* peak"};
    }
    return {true, name + ": e* peaks at " + fmt(value_of(rows[top_end])) + ", alpha* < 1 from " +
                      fmt(value_of(rows[first_partial])) + ", full cover below " + fmt(t_full)};
}

struct RandomModel {
    Scenario sc;
    std::string text;
};

// Draws from the parameter ranges of the reference experiments.
RandomModel random_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
    const double k = in(2.5, 5.0);
    const double xhat = in(1.0, 5.0);
    const double gamma2 = in(0.9, 25.0);
    const double gamma1 = gamma2 * in(0.005, 0.6);
    const double kappa = in(0.01, 1.0);
    const double t1 = in(0.0, 20.0);
    const double t2 = in(0.01, 20.0);
    const bool tvar = u(rng) < 0.5;
    const double level = tvar ? in(0.5, 0.99) : in(0.5, 0.95);
    const DistortionMeasure m = tvar ? DistortionMeasure::tvar(level) : DistortionMeasure::power(level);
    Scenario sc{MixtureLoss{Prevention{LossProbability::hyperbolic(gamma1, gamma2), EffortCost::quadratic(kappa)},
                            Severity::pareto(xhat, k)},
                Premium::quadratic(t1, t2), m, SolverOptions{}};
    std::ostringstream os;
    os << "k=" << fmt(k, 4) << " xhat=" << fmt(xhat, 4) << " g1=" << fmt(gamma1, 4) << " g2=" << fmt(gamma2, 4)
       << " kappa=" << fmt(kappa, 4) << " t1=" << fmt(t1, 4) << " t2=" << fmt(t2, 4) << (tvar ? " beta=" : " r=")
       << fmt(level, 4);
    return {sc, os.str()};
}

// Property checks on one scenario; returns an empty string when all hold.
std::string invariants(const Scenario& sc) {
    const SolveResult res = solve(sc);
    const double e_hi = std::max({2.0 * sc.e_beta(), 10.0 * sc.mixture.prevention.p.effort_scale(),
                                  4.0 * res.e_star, 1.0});
    constexpr int n = 2000;

    // alpha*_e continuous and non-decreasing; G1 > G2 for strictly convex h.
    double prev_a = optimal_share(sc, 0.0).alpha;
    for (int i = 1; i <= n; ++i) {
        const double e0 = e_hi * (i - 1) / n;
        const double e = e_hi * i / n;
        const double a = optimal_share(sc, e).alpha;
        if (a < prev_a - 1e-10) {
            return "alpha*_e decreases at e=" + fmt(e);
        }
        if (a - prev_a > 0.02) {
            // Refine: a continuous profile shrinks its steps with the grid.
            double pa = prev_a;
            for (int j = 1; j <= 1000; ++j) {
                const double x = optimal_share(sc, e0 + (e - e0) * j / 1000).alpha;
                if (x - pa > 0.002) {
                    return "alpha*_e jumps near e=" + fmt(e0 + (e - e0) * j / 1000);
                }
                pa = x;
            }
        }
        prev_a = a;
        if (sc.premium.strictly_convex() && !(g1(sc, e) > g2(sc, e))) {
            return "G1 <= G2 at e=" + fmt(e);
        }
    }

    // K continuous at every threshold.
    for (const auto& t : {res.thresholds.e_G1, res.thresholds.e_G2, res.thresholds.e_beta}) {
        if (!t || *t <= 0.0) {
            continue;
        }
        const double d = 1e-8 * std::max(1.0, *t);
        const double kl = k_objective(sc, *t - d);
        const double kr = k_objective(sc, *t + d);
        if (std::abs(kl - kr) > kContinuityTol * (1.0 + std::abs(kl))) {
            return "K jumps by " + fmt(kr - kl) + " at e=" + fmt(*t);
        }
    }

    // H(0) = 1 and H(e_B) = 0.
    if (std::abs(incentive_share(sc, 0.0) - 1.0) > 1e-12) {
        return "H(0) = " + fmt(incentive_share(sc, 0.0), 17);
    }
    const double eb = solve_e_B(sc);
    if (std::abs(incentive_share(sc, eb)) > 1e-6) {
        return "H(e_B) = " + fmt(incentive_share(sc, eb));
    }

    // Premium at least the ceded mean; rho above the mean and non-increasing.
    double prev_rho = sc.rho(0.0);
    for (int i = 0; i <= 200; ++i) {
        const double e = e_hi * i / 200;
        const double mean = sc.mixture.mean(e);
        for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            if (premium(sc.premium, sc.mixture, e, a) < a * mean * (1.0 - 1e-14)) {
                return "premium below ceded mean at e=" + fmt(e);
            }
        }
        const double r = sc.rho(e);
        if (r < mean * (1.0 - 1e-12)) {
            return "rho below the mean at e=" + fmt(e);
        }
        if (r > prev_rho * (1.0 + 1e-12)) {
            return "rho increases at e=" + fmt(e);
        }
        prev_rho = r;
    }
    return "";
}

}  // namespace

int main() {
    report(1, "theta1 partition", [] {
        return thresholds("sec5_1_1", {3.918, 5.118, 17.799, 19.000}, kThetaTol, kBudgetAC1);
    });

    report(2, "theta2 partition", [] { return thresholds("sec5_1_2", {1.709, 5.250}, kThetaTol); });

    report(3, "beta partition",
           [] { return thresholds("sec5_1_3", {0.750, 0.818, 0.911, 0.960}, kBetaTol); });

    report(4, "theta1 partition, power distortion",
           [] { return thresholds("sec5_2_1", {6.155, 12.155}, kThetaTol); });

    report(5, "moral-hazard boundary e_B", [] {
        const double eb = solve_e_B(materialize(load(fixture("sec6_1"))));
        const double d = std::abs(eb - 0.569135);
        return Outcome{d <= kEBTol, "e_B=" + fmt(eb, 12) + " |d|=" + fmt(d, 3) + " (tol 1e-4)"};
    });

    report(6, "theta1 sweep shape", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rows = run_sweep(load(fixture("sec5_1_1")), Mode::Sweep);
        const double dt = elapsed(t0);
        std::string why;
        if (any_failure(rows, why)) {
            return Outcome{false, why};
        }
        if (rows.size() != 401) {
            return Outcome{false, std::to_string(rows.size()) + " rows"};
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double v = value_of(rows[i]);
            const double a = rows[i].alpha_star;
            if (v < 3.918 && a < 1.0 - kShareTol) {
                return Outcome{false, "alpha*=" + fmt(a) + " < 1 at theta1=" + fmt(v)};
            }
            if (v > 5.3 && a > kShareTol) {
                return Outcome{false, "alpha*=" + fmt(a) + " > 0 at theta1=" + fmt(v)};
            }
            if (i > 0 && v > 3.918 && v <= 5.3) {
                const double pa = rows[i - 1].alpha_star;
                const bool interior = a > kShareTol && pa < 1.0 - kShareTol;
                if (a > pa + kShareTol || (interior && !(a < pa))) {
                    return Outcome{false, "alpha* not decreasing at theta1=" + fmt(v)};
                }
            }
        }
        const double peak = value_of(rows[argmax_e(rows)]);
        const bool ok = peak >= 3.9 && peak <= 4.3 && dt < kBudgetAC6;
        return Outcome{ok, "alpha* 1 -> 0 over (3.918, 5.3], e* peaks at theta1=" + fmt(peak) + ", " +
                               fmt(dt, 3) + " s (budget 30 s)"};
    });

    report(7, "complementarity on theta2 and r sweeps", [] {
        std::string detail;
        for (const char* name : {"sec5_1_2", "sec5_2_2", "sec5_2_3"}) {
            const Outcome o = complementarity(name);
            if (!o.pass) {
                return o;
            }
            detail += (detail.empty() ? "" : "; ") + o.detail;
        }
        return Outcome{true, detail};
    });

    report(8, "substitution under moral hazard", [] {
        const auto rows = run_sweep(load(fixture("sec6_1")), Mode::MoralHazard);
        std::string why;
        if (any_failure(rows, why)) {
            return Outcome{false, why};
        }
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double tol = kMonotoneTol * std::max(1.0, rows[i].e_star);
            if (rows[i].alpha_star > rows[i - 1].alpha_star + kMonotoneTol) {
                return Outcome{false, "alpha* rises at theta1=" + fmt(value_of(rows[i]))};
            }
            if (rows[i].e_star < rows[i - 1].e_star - tol) {
                return Outcome{false, "e* falls at theta1=" + fmt(value_of(rows[i]))};
            }
        }
        return Outcome{true, "alpha* non-increasing " + fmt(rows.front().alpha_star) + " -> " +
                                 fmt(rows.back().alpha_star, 3) + ", e* non-decreasing " +
                                 fmt(rows.front().e_star) + " -> " + fmt(rows.back().e_star)};
    });

    report(9, "solver vs 512x512 grid oracle, 20 random scenarios", [] {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(kRandomSeed);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const RandomModel m = random_model(rng);
            const SolveResult r = solve(m.sc);
            const GridResult g = grid_search(m.sc, 0.0, coercive_effort_bound(m.sc), 512, 512);
            const double rel = std::abs(r.objective - g.value) / std::abs(g.value);
            worst = std::max(worst, rel);
            if (r.diagnostics.failure || rel > kOracleRelTol) {
                return Outcome{false, "scenario " + std::to_string(i) + " (" + m.text + "): solver " +
                                          fmt(r.objective, 12) + " grid " + fmt(g.value, 12)};
            }
        }
        const double dt = elapsed(t0);
        return Outcome{dt < kBudgetAC9, "0/20 disagreements, max rel gap " + fmt(worst, 3) + " (tol 1e-6), " +
                                            fmt(dt, 3) + " s (budget 300 s)"};
    });

    report(10, "Monte Carlo at the theta1 base, n=1e6, seed 42", [] {
        const Scenario sc = materialize(load(fixture("sec5_1_1")));
        const McReport a = mc_estimate(sc, 0.0, 1.0, 1000000, 42);
        const McReport b = mc_estimate(sc, 0.0, 1.0, 1000000, 42);
        const bool reproducible = a.mean.estimate == b.mean.estimate && a.tvar.estimate == b.tvar.estimate &&
                                  a.premium.estimate == b.premium.estimate &&
                                  a.weighted_loss.estimate == b.weighted_loss.estimate;
        const bool refs = std::abs(a.tvar.reference - 7.3420) < 5e-5 && std::abs(a.mean.reference - 1.2) < 1e-12;
        std::ostringstream os;
        bool within = true;
        for (const auto& [label, q] : {std::pair{"TVaR", a.tvar}, {"E[X]", a.mean}, {"E[h]", a.premium},
                                       {"E[Xh']", a.weighted_loss}}) {
            const double z = (q.estimate - q.reference) / q.std_error;
            within = within && std::abs(z) <= kMcSigmas;
            os << label << " " << fmt(q.reference) << " z=" << fmt(z, 3) << "; ";
        }
        os << (reproducible ? "bit-identical rerun" : "rerun differs");
        return Outcome{within && reproducible && refs, os.str()};
    });

    report(11, "invariants on fixtures and 50 random configurations", [] {
        int checked = 0;
        for (const char* name : {"sec5_1_1", "sec5_1_2", "sec5_1_3", "sec5_2_1", "sec5_2_2", "sec5_2_3",
                                 "sec6_1", "sec6_2", "sec6_3"}) {
            const ScenarioConfig cfg = load(fixture(name));
            for (int idx : {-1, 0, cfg.sweep->steps / 2, cfg.sweep->steps - 1}) {
                const Scenario sc = idx < 0 ? materialize(cfg) : materialize(cfg, idx);
                const std::string why = invariants(sc);
                if (!why.empty()) {
                    return Outcome{false, std::string(name) + " point " + std::to_string(idx) + ": " + why};
                }
                ++checked;
            }
        }
        std::mt19937_64 rng(kRandomSeed + 1);
        for (int i = 0; i < 50; ++i) {
            const RandomModel m = random_model(rng);
            const std::string why = invariants(m.sc);
            if (!why.empty()) {
                return Outcome{false, "random " + std::to_string(i) + " (" + m.text + "): " + why};
            }
            ++checked;
        }
        return Outcome{true, std::to_string(checked) + " scenarios, all properties hold"};
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures;
}
