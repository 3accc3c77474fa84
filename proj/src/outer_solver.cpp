// SPDX-License-Identifier: MIT
#include "preventix/outer_solver.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace preventix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kConvexityCheckPoints = 257;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

std::string interval(const Segment& s) {
    return "[" + fmt(s.lo) + ", " + (std::isfinite(s.hi) ? fmt(s.hi) : std::string("inf")) + "]";
}

double expansion_start(const Scenario& sc) {
    return std::max(10.0 * sc.e_beta(), 10.0 * sc.mixture.prevention.p.effort_scale());
}

double expansion_cap(const Scenario& sc) { return std::ldexp(sc.scale(), 20); }

// First crossing of an increasing residual for concave distortions: the
// search starts on [0, e_max] and doubles while no crossing is seen.
std::optional<double> drm_threshold(const Scenario& sc, const numerics::ScalarFn& residual,
                                    const char* what, Diagnostics& diag) {
    if (residual(0.0) >= 0.0) {
        return 0.0;
    }
    double hi = sc.e_max();
    while (residual(hi) < 0.0) {
        if (hi > expansion_cap(sc)) {
            diag.note(std::string(what) + ": no crossing up to " + fmt(hi) +
                      "; search interval clamped");
            return std::nullopt;
        }
        hi *= 2.0;
    }
    return numerics::bisect(residual, 0.0, hi, 1e-10 * std::max(1.0, hi));
}

bool numerically_convex(const Scenario& sc, const Segment& seg) {
    const double hi = std::isfinite(seg.hi) ? seg.hi : seg.lo + expansion_start(sc);
    if (!(hi > seg.lo)) {
        return true;
    }
    const auto xs = numerics::linspace(seg.lo, hi, kConvexityCheckPoints);
    std::vector<double> v(xs.size());
    double mag = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v[i] = branch_objective(sc, seg.kind, xs[i]);
        mag = std::max(mag, std::abs(v[i]));
    }
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i + 1] - 2.0 * v[i] + v[i - 1] < -1e-9 * (1.0 + mag)) {
            return false;
        }
    }
    return true;
}

BranchMinimum convex_minimum(const Scenario& sc, const Segment& seg, Diagnostics* diag) {
    const double s = sc.scale();
    const double h = 1e-7 * s;
    const auto f = [&](double e) { return branch_objective(sc, seg.kind, e); };
    // One-sided difference that never leaves the segment.
    const auto slope = [&](double x) {
        if (x + h <= seg.hi) {
            return (f(x + h) - f(x)) / h;
        }
        return (f(x) - f(x - h)) / h;
    };

    BranchMinimum out;
    out.segment = seg;
    out.mode = "convex";

    double a = seg.lo;
    double b = seg.lo;
    if (slope(seg.lo) < 0.0) {
        if (std::isfinite(seg.hi)) {
            b = seg.hi;
            if (slope(seg.hi) <= 0.0) {
                a = seg.hi;
            }
        } else {
            b = std::max({expansion_start(sc), 2.0 * seg.lo, seg.lo + s});
            while (slope(b) < 0.0) {
                if (b > expansion_cap(sc)) {
                    if (diag != nullptr) {
                        diag->fail("objective still decreasing at the expansion cap " + fmt(b) +
                                   " on " + interval(seg));
                    }
                    out.e = b;
                    out.value = f(b);
                    return out;
                }
                a = b;
                b = seg.lo + 2.0 * (b - seg.lo);
            }
        }
        const double width = std::max(1e-6 * s, 4.0 * h);
        while (b - a > width) {
            const double mid = 0.5 * (a + b);
            if (slope(mid) < 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
    }
    const double pad = (b - a) + 2.0 * h;
    const double lo = std::max(seg.lo, a - pad);
    const double hi = std::min(seg.hi, b + pad);
    const auto m = numerics::golden_section(f, lo, hi, sc.options.effort_tol * s);
    out.e = m.x;
    out.value = m.value;

    // Golden section stalls near sqrt(eps) on a flat minimum; polish the
    // stationary point with central differences when it is interior.
    const double hc = 1e-5 * std::max(1.0, m.x);
    if (m.x - 2.0 * hc > seg.lo && m.x + 2.0 * hc < seg.hi) {
        const auto cslope = [&](double x) { return (f(x + hc) - f(x - hc)) / (2.0 * hc); };
        double l = m.x - hc;
        double r = m.x + hc;
        if (cslope(l) < 0.0 && cslope(r) > 0.0) {
            while (r - l > 1e-13 * std::max(1.0, m.x)) {
                const double mid = 0.5 * (l + r);
                (cslope(mid) < 0.0 ? l : r) = mid;
            }
            const double x = 0.5 * (l + r);
            const double v = f(x);
            if (v <= m.value + 1e-14 * (1.0 + std::abs(m.value))) {
                out.e = x;
                out.value = std::min(v, m.value);
            }
        }
    }
    return out;
}

BranchMinimum grid_minimum(const Scenario& sc, const Segment& seg) {
    const double s = sc.scale();
    const auto f = [&](double e) { return branch_objective(sc, seg.kind, e); };
    BranchMinimum out;
    out.segment = seg;
    out.mode = "grid";

    double hi = seg.hi;
    if (!std::isfinite(hi)) {
        // K >= c everywhere, so no effort with c(e) > K(lo) can beat lo.
        hi = std::max(seg.lo, sc.mixture.prevention.cost.inverse(f(seg.lo)));
    }
    if (!(hi > seg.lo)) {
        out.e = seg.lo;
        out.value = f(seg.lo);
        out.local_minima.push_back({out.e, out.value});
        return out;
    }
    const int n = std::max(3, sc.options.interior_grid);
    const auto xs = numerics::linspace(seg.lo, hi, static_cast<std::size_t>(n));
    std::vector<double> v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        v[i] = f(xs[i]);
    }
    out.value = kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const bool left_ok = i == 0 || v[i] < v[i - 1];
        const bool right_ok = i + 1 == xs.size() || v[i] <= v[i + 1];
        if (!(left_ok && right_ok)) {
            continue;
        }
        const double a = xs[i == 0 ? 0 : i - 1];
        const double b = xs[i + 1 == xs.size() ? i : i + 1];
        const auto m = numerics::golden_section(f, a, b, sc.options.effort_tol * s);
        out.local_minima.push_back({m.x, m.value});
        if (m.value < out.value) {
            out.e = m.x;
            out.value = m.value;
        }
    }
    return out;
}

}  // namespace

void Diagnostics::merge(const Diagnostics& other) {
    failure = failure || other.failure;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

const char* to_string(BranchKind kind) {
    switch (kind) {
        case BranchKind::Null:
            return "null";
        case BranchKind::Interior:
            return "interior";
        case BranchKind::Full:
            return "full";
        case BranchKind::Frozen:
            return "frozen";
    }
    return "?";
}

double k_objective(const Scenario& sc, double e) {
    const ShareDecision d = optimal_share(sc, e);
    const double r = sc.rho(e);
    return premium(sc.premium, sc.mixture, e, d.alpha) - d.alpha * r + r +
           sc.mixture.cost(e);
}

double branch_objective(const Scenario& sc, BranchKind kind, double e) {
    const double c = sc.mixture.cost(e);
    switch (kind) {
        case BranchKind::Null:
            return sc.rho(e) + c;
        case BranchKind::Full:
            return premium(sc.premium, sc.mixture, e, 1.0) + c;
        case BranchKind::Interior:
        case BranchKind::Frozen:
            break;
    }
    const double p = sc.p(e);
    const double r = sc.rho(e);
    const double a = alpha_for_psi(sc.premium, sc.mixture.severity, r / p, sc.options.alpha_tol);
    return p * sc.premium.expected_h(sc.mixture.severity, a) - a * r + r + c;
}

std::vector<Segment> decompose(const Scenario& sc, std::string& case_label,
                               Thresholds& thresholds, Diagnostics& diag) {
    using K = BranchKind;
    std::vector<Segment> segs;
    case_label = classify_case(sc);
    if (sc.is_tvar()) {
        const double eb = sc.e_beta();
        thresholds.e_beta = eb;
        if (case_label == "TVaR-i") {
            segs = {{0.0, kInf, K::Full, true}};
        } else if (case_label == "TVaR-ii") {
            const double g2e = solve_e_G2(sc);
            thresholds.e_G2 = g2e;
            segs = {{0.0, g2e, K::Interior, false}, {g2e, kInf, K::Full, true}};
        } else if (case_label == "TVaR-iii") {
            segs = {{0.0, eb, K::Interior, false}, {eb, kInf, K::Frozen, true}};
        } else if (case_label == "TVaR-iv") {
            const double g1e = solve_e_G1(sc);
            const double g2e = solve_e_G2(sc);
            thresholds.e_G1 = g1e;
            thresholds.e_G2 = g2e;
            segs = {{0.0, g1e, K::Null, true},
                    {g1e, g2e, K::Interior, false},
                    {g2e, kInf, K::Full, true}};
        } else if (case_label == "TVaR-v") {
            const double g1e = solve_e_G1(sc);
            thresholds.e_G1 = g1e;
            segs = {{0.0, g1e, K::Null, true},
                    {g1e, eb, K::Interior, false},
                    {eb, kInf, K::Frozen, true}};
        } else {
            segs = {{0.0, kInf, K::Null, true}};
        }
        if (case_label == "TVaR-iii" || case_label == "TVaR-v") {
            const double a = optimal_share(sc, eb).alpha;
            if (!(a > 0.0 && a < 1.0)) {
                diag.note("frozen share at e_beta is not interior (alpha = " + fmt(a) + ")");
            }
        }
        // rho has a concave kink at e_beta, so convex pieces must not straddle it.
        std::vector<Segment> split;
        for (const Segment& s : segs) {
            if (s.convex && s.lo < eb && eb < s.hi) {
                split.push_back({s.lo, eb, s.kind, true});
                split.push_back({eb, s.hi, s.kind, true});
            } else {
                split.push_back(s);
            }
        }
        return split;
    }

    const double h0 = sc.premium.h_prime_at_zero();
    const auto r1 = [&](double e) { return g1(sc, e) - h0; };
    const auto r2 = [&](double e) { return g2(sc, e) - 1.0; };
    if (case_label == "DRM-i") {
        return {{0.0, kInf, K::Full, true}};
    }
    double start = 0.0;
    if (case_label == "DRM-iii") {
        const auto g1e = drm_threshold(sc, r1, "G1 threshold", diag);
        if (!g1e) {
            return {{0.0, kInf, K::Null, true}};
        }
        thresholds.e_G1 = *g1e;
        segs.push_back({0.0, *g1e, K::Null, true});
        start = *g1e;
    }
    const auto g2e = drm_threshold(sc, r2, "G2 threshold", diag);
    if (!g2e) {
        segs.push_back({start, expansion_cap(sc), K::Interior, false});
        return segs;
    }
    thresholds.e_G2 = *g2e;
    segs.push_back({start, *g2e, K::Interior, false});
    segs.push_back({*g2e, kInf, K::Full, true});
    return segs;
}

BranchMinimum minimize_branch(const Scenario& sc, const Segment& segment, bool convexity_hint,
                              Diagnostics* diag) {
    if (!(segment.hi >= segment.lo) || !(segment.lo >= 0.0)) {
        throw PreconditionError("minimize_branch: empty interval");
    }
    if (segment.hi == segment.lo) {
        BranchMinimum out;
        out.segment = segment;
        out.e = segment.lo;
        out.value = branch_objective(sc, segment.kind, segment.lo);
        out.mode = "point";
        out.local_minima.push_back({out.e, out.value});
        return out;
    }
    if (convexity_hint) {
        if (numerically_convex(sc, segment)) {
            return convex_minimum(sc, segment, diag);
        }
        if (diag != nullptr) {
            diag->note(std::string("convexity check failed for the ") + to_string(segment.kind) +
                       " branch on " + interval(segment) + "; using grid mode");
        }
    }
    BranchMinimum out = grid_minimum(sc, segment);
    if (diag != nullptr && out.local_minima.size() > 1) {
        diag->note(std::to_string(out.local_minima.size()) + " local minima on the " +
                   to_string(segment.kind) + " branch " + interval(segment));
    }
    return out;
}

SolveResult solve(const Scenario& sc) {
    if (!sc.measure.concave()) {
        throw UnsupportedMeasure("solve: the distortion must be concave");
    }
    SolveResult res;
    res.segments = decompose(sc, res.case_label, res.thresholds, res.diagnostics);
    if (!check_risk_convexity(sc, 400)) {
        res.diagnostics.note("risk term is not convex in effort; convex branches were re-checked");
    }
    const BranchMinimum* best = nullptr;
    for (const Segment& seg : res.segments) {
        res.branch_minima.push_back(minimize_branch(sc, seg, seg.convex, &res.diagnostics));
    }
    for (const BranchMinimum& m : res.branch_minima) {
        if (best == nullptr) {
            best = &m;
            continue;
        }
        const double tie = 1e-10 * (1.0 + std::abs(best->value));
        if (m.value < best->value - tie || (std::abs(m.value - best->value) <= tie && m.e < best->e)) {
            best = &m;
        }
    }
    res.e_star = best->e;
    const ShareDecision d = optimal_share(sc, res.e_star);
    res.alpha_star = d.alpha;
    res.branch = d.branch;
    res.objective = k_objective(sc, res.e_star);
    return res;
}

bool check_risk_convexity(const Scenario& sc, int points) {
    std::vector<double> v;
    if (sc.is_tvar()) {
        const double eb = sc.e_beta();
        if (eb <= 0.0) {
            return true;
        }
        const double beta = sc.measure.beta();
        for (double e : numerics::linspace(0.0, eb, static_cast<std::size_t>(points))) {
            const double p = sc.p(e);
            const double level = std::max(0.0, (beta + p - 1.0) / p);
            v.push_back(p * sc.mixture.severity.tail_integral(level, 1.0));
        }
    } else {
        const double hi = 5.0 * sc.mixture.prevention.p.effort_scale();
        for (double e : numerics::linspace(0.0, hi, static_cast<std::size_t>(points))) {
            v.push_back(sc.rho(e));
        }
    }
    double mag = 0.0;
    for (double x : v) {
        mag = std::max(mag, std::abs(x));
    }
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i + 1] - 2.0 * v[i] + v[i - 1] < -1e-8 * std::max(1.0, mag)) {
            return false;
        }
    }
    return true;
}

}  // namespace preventix
