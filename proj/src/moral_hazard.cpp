// SPDX-License-Identifier: MIT
#include "preventix/moral_hazard.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace preventix {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

double share_from_slopes(const Scenario& sc, double e, double drho) {
    if (drho == 0.0 || !std::isfinite(drho)) {
        throw DegenerateEffort("rho' vanished; incentive share undefined");
    }
    return 1.0 + sc.mixture.cost_prime(e) / drho;
}

// c' + rho' using the requested one-sided derivative.
double marginal(const Scenario& sc, double e, bool left) {
    const OneSided d = sc.rho_prime(e);
    return sc.mixture.cost_prime(e) + (left ? d.left : d.right);
}

struct Piece {
    double lo;
    double hi;
};

std::vector<Piece> smooth_pieces(const Scenario& sc, double hi) {
    const double eb = sc.e_beta();
    if (sc.is_tvar() && eb > 0.0 && eb < hi) {
        return {{0.0, eb}, {eb, hi}};
    }
    return {{0.0, hi}};
}

double ic_step(double e_B) { return std::max(1e-3, 4.0 * e_B / 4096.0); }

}  // namespace

double incentive_share(const Scenario& sc, double e) {
    if (e == 0.0) {
        return 1.0;
    }
    return share_from_slopes(sc, e, sc.rho_prime(e).right);
}

double incentive_share_left(const Scenario& sc, double e) {
    if (e == 0.0) {
        return 1.0;
    }
    return share_from_slopes(sc, e, sc.rho_prime(e).left);
}

double incentive_share_closed_form(const Scenario& sc, double e) {
    const auto& pr = sc.mixture.prevention;
    const Severity& y = sc.mixture.severity;
    if (!sc.is_tvar() || y.family() != Severity::Family::Pareto ||
        pr.p.family() != LossProbability::Family::Hyperbolic ||
        pr.cost.family() != EffortCost::Family::Quadratic) {
        throw UnsupportedMeasure("closed-form H needs TVaR, Pareto, hyperbolic p, quadratic c");
    }
    if (!(e >= 0.0)) {
        throw DomainError("effort must be non-negative");
    }
    const double k = y.k();
    const double xh = y.xhat();
    const double beta = sc.measure.beta();
    const double kappa = pr.cost.kappa();
    const double g1 = pr.p.gamma1();
    const double g2 = pr.p.gamma2();
    if (e < sc.e_beta()) {
        return 1.0 - 2.0 * kappa * (k - 1.0) / xh * std::pow(1.0 - beta, 1.0 / k) *
                         std::pow(g1, -1.0 / k) * e * std::pow(g2 + e, 1.0 / k + 1.0);
    }
    return 1.0 - 2.0 * kappa * (k - 1.0) / (xh * k * g1) * (1.0 - beta) * e * (g2 + e) * (g2 + e);
}

std::vector<Interval> admissible_set(const Scenario& sc, Diagnostics* diag) {
    const double s = sc.scale();
    const double cap_limit = std::ldexp(s, 20);
    double hi = std::max(10.0 * sc.e_beta(), 10.0 * sc.mixture.prevention.p.effort_scale());
    while (marginal(sc, hi, false) <= 0.0) {
        if (hi > cap_limit) {
            if (diag != nullptr) {
                diag->fail("c' + rho' still non-positive at " + fmt(hi));
            }
            break;
        }
        hi *= 2.0;
    }

    const int n = std::max(8, sc.options.moral_hazard_grid);
    const double tol = 1e-13 * std::max(1.0, hi);
    std::vector<Interval> out;
    bool open = false;
    double start = 0.0;
    for (const Piece& pc : smooth_pieces(sc, hi)) {
        const auto xs = numerics::linspace(pc.lo, pc.hi, static_cast<std::size_t>(n));
        // Inside a piece the derivative is smooth; the ends use one-sided values.
        const auto phi = [&](double e) {
            if (e <= pc.lo) {
                return marginal(sc, pc.lo, false);
            }
            if (e >= pc.hi) {
                return marginal(sc, pc.hi, true);
            }
            return marginal(sc, e, false);
        };
        double prev = phi(xs.front());
        if (!open && prev <= 0.0) {
            open = true;
            start = pc.lo;
        } else if (open && prev > 0.0) {
            // Only possible across a piece boundary with an upward jump.
            out.push_back({start, pc.lo});
            open = false;
        }
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double cur = phi(xs[i]);
            if ((prev <= 0.0) != (cur <= 0.0)) {
                const double root = numerics::bisect(phi, xs[i - 1], xs[i], tol);
                if (open) {
                    out.push_back({start, root});
                    open = false;
                } else {
                    open = true;
                    start = root;
                }
            }
            prev = cur;
        }
    }
    if (open) {
        out.push_back({start, hi});
    }
    return out;
}

double solve_e_B(const Scenario& sc) {
    const auto b = admissible_set(sc);
    if (b.empty()) {
        throw SolverFailure("admissible set is empty");
    }
    return b.front().hi;
}

double constrained_objective(const Scenario& sc, double e) {
    if (e == 0.0) {
        return premium(sc.premium, sc.mixture, 0.0, 1.0);
    }
    double h = incentive_share(sc, e);
    if (h < -1e-9 || h > 1.0 + 1e-9) {
        throw PreconditionError("constrained_objective: effort outside the admissible set");
    }
    h = std::clamp(h, 0.0, 1.0);
    const double r = sc.rho(e);
    return r * (1.0 - h) + premium(sc.premium, sc.mixture, e, h) + sc.mixture.cost(e);
}

double incentive_objective(const Scenario& sc, double alpha, double b) {
    return (1.0 - alpha) * sc.rho(b) + sc.mixture.cost(b);
}

double incentive_argmin(const Scenario& sc, double alpha, double e_B) {
    const double step = ic_step(e_B);
    const double hi = 4.0 * e_B;
    double best_b = 0.0;
    double best = incentive_objective(sc, alpha, 0.0);
    for (int i = 1; step * i <= hi + 1e-12; ++i) {
        const double b = step * i;
        const double v = incentive_objective(sc, alpha, b);
        if (v < best) {
            best = v;
            best_b = b;
        }
    }
    return best_b;
}

MoralHazardResult solve_moral_hazard(const Scenario& sc) {
    MoralHazardResult res;
    const double corner = constrained_objective(sc, 0.0);
    res.admissible = admissible_set(sc, &res.diagnostics);
    res.objective = corner;
    if (res.admissible.empty()) {
        res.diagnostics.note("admissible set is empty; corner solution");
        return res;
    }
    res.e_B = res.admissible.front().hi;
    const double s = sc.scale();
    const double eb = sc.e_beta();
    const auto L = [&](double e) { return constrained_objective(sc, e); };

    if (sc.is_tvar() && eb > 0.0 && eb < res.e_B) {
        const double hl = std::clamp(incentive_share_left(sc, eb), 0.0, 1.0);
        const double left = sc.rho(eb) * (1.0 - hl) + premium(sc.premium, sc.mixture, eb, hl) +
                            sc.mixture.cost(eb);
        res.diagnostics.note("L jumps by " + fmt(L(eb) - left) + " at e_beta = " + fmt(eb));
    }

    const int n = std::max(8, sc.options.moral_hazard_grid);
    for (const Interval& iv : res.admissible) {
        std::vector<Piece> pieces;
        if (sc.is_tvar() && iv.lo < eb && eb < iv.hi) {
            pieces = {{iv.lo, eb}, {eb, iv.hi}};
        } else {
            pieces = {{iv.lo, iv.hi}};
        }
        for (const Piece& pc : pieces) {
            if (!(pc.hi > pc.lo)) {
                continue;
            }
            // Stay strictly inside the left piece so H uses its own branch.
            const double hi = (pc.hi == eb) ? std::nextafter(eb, 0.0) : pc.hi;
            const auto xs = numerics::linspace(pc.lo, hi, static_cast<std::size_t>(n));
            std::vector<double> v(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                v[i] = L(xs[i]);
            }
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const bool left_ok = i == 0 || v[i] < v[i - 1];
                const bool right_ok = i + 1 == xs.size() || v[i] <= v[i + 1];
                if (!(left_ok && right_ok)) {
                    continue;
                }
                const double a = xs[i == 0 ? 0 : i - 1];
                const double b = xs[i + 1 == xs.size() ? i : i + 1];
                const auto m = numerics::golden_section(L, a, b, sc.options.effort_tol * s);
                res.candidates.push_back({m.x, m.value});
            }
        }
    }
    std::sort(res.candidates.begin(), res.candidates.end(), [](const auto& x, const auto& y) {
        return x.second < y.second || (x.second == y.second && x.first < y.first);
    });

    const double step = ic_step(res.e_B);
    for (const auto& [e, value] : res.candidates) {
        if (e == 0.0) {
            continue;
        }
        const double alpha = std::clamp(incentive_share(sc, e), 0.0, 1.0);
        const double b = incentive_argmin(sc, alpha, res.e_B);
        const double fb = incentive_objective(sc, alpha, b);
        const double fe = incentive_objective(sc, alpha, e);
        const bool ic = std::abs(b - e) <= step || fe <= fb + 1e-9 * (1.0 + std::abs(fb));
        if (!ic) {
            res.diagnostics.note("candidate e = " + fmt(e) + " fails the incentive check");
            continue;
        }
        const double tie = 1e-10 * (1.0 + std::abs(corner));
        if (value < corner - tie) {
            res.e_star = e;
            res.alpha_star = alpha;
            res.objective = value;
            res.corner_taken = false;
            const OneSided d = sc.rho_prime(e);
            const double cp = sc.mixture.cost_prime(e);
            res.foc_residual = ((1.0 - alpha) * d.right + cp) / (std::abs(cp) + std::abs(d.right));
        }
        break;
    }
    return res;
}

}  // namespace preventix
