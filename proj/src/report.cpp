// SPDX-License-Identifier: MIT
#include "preventix/report.hpp"

#include <cmath>

namespace preventix {

namespace {

using nlohmann::json;

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json mc_json(const McQuantity& q) {
    return {{"estimate", q.estimate},
            {"std_error", q.std_error},
            {"reference", q.reference},
            {"agrees", q.agrees}};
}

json mc_json(const McReport& r) {
    json out = {{"e", r.e},
                {"alpha", r.alpha},
                {"samples", r.samples},
                {"seed", r.seed},
                {"mean", mc_json(r.mean)},
                {"premium", mc_json(r.premium)},
                {"weighted_loss", mc_json(r.weighted_loss)}};
    if (r.has_tvar) {
        out["tvar"] = mc_json(r.tvar);
    }
    out["agrees"] = r.agrees();
    return out;
}

json derivative_json(const DerivativeReport& d) {
    json out = {{"analytic", d.analytic},
                {"numeric", d.numeric},
                {"rel_error", d.rel_error},
                {"inconclusive", d.inconclusive},
                {"agrees", d.agrees}};
    if (!d.note.empty()) {
        out["note"] = d.note;
    }
    return out;
}

}  // namespace

json metadata(const ScenarioConfig& config, Mode mode) {
    return {{"tool", "preventix"},
            {"version", kVersion},
            {"mode", to_string(mode)},
            {"seed", config.seed},
            {"config", to_json(config)},
            {"overrides", config.overrides},
            {"warnings", config.warnings}};
}

json result_json(const SolveResult& r) {
    json segs = json::array();
    for (const Segment& s : r.segments) {
        segs.push_back({{"lo", s.lo},
                        {"hi", std::isfinite(s.hi) ? json(s.hi) : json("inf")},
                        {"kind", to_string(s.kind)},
                        {"convex", s.convex}});
    }
    json mins = json::array();
    for (const BranchMinimum& m : r.branch_minima) {
        mins.push_back({{"kind", to_string(m.segment.kind)},
                        {"e", m.e},
                        {"value", m.value},
                        {"mode", m.mode}});
    }
    return {{"e_star", r.e_star},
            {"alpha_star", r.alpha_star},
            {"objective", r.objective},
            {"branch", to_string(r.branch)},
            {"case_label", r.case_label},
            {"e_G1", opt(r.thresholds.e_G1)},
            {"e_G2", opt(r.thresholds.e_G2)},
            {"e_beta", opt(r.thresholds.e_beta)},
            {"segments", segs},
            {"branch_minima", mins},
            {"diagnostics", {{"failure", r.diagnostics.failure}, {"notes", r.diagnostics.notes}}}};
}

json result_json(const MoralHazardResult& r) {
    json adm = json::array();
    for (const Interval& iv : r.admissible) {
        adm.push_back({iv.lo, iv.hi});
    }
    json cands = json::array();
    for (const auto& [e, v] : r.candidates) {
        cands.push_back({{"e", e}, {"value", v}});
    }
    return {{"e_star", r.e_star},
            {"alpha_star", r.alpha_star},
            {"objective", r.objective},
            {"e_B", r.e_B},
            {"corner_taken", r.corner_taken},
            {"admissible", adm},
            {"candidates", cands},
            {"foc_residual", r.foc_residual},
            {"diagnostics", {{"failure", r.diagnostics.failure}, {"notes", r.diagnostics.notes}}}};
}

json row_json(const SweepRow& row) {
    json out = {{"index", row.index},
                {"parameter", row.parameter},
                {"value", opt(row.value)},
                {"e_star", row.e_star},
                {"alpha_star", row.alpha_star},
                {"objective", row.objective},
                {"case_label", row.case_label},
                {"e_G1", opt(row.e_G1)},
                {"e_G2", opt(row.e_G2)},
                {"e_beta", opt(row.e_beta)},
                {"e_B", opt(row.e_B)},
                {"corner_taken", row.corner_taken ? json(*row.corner_taken) : json(nullptr)},
                {"failure", row.failure}};
    if (!row.notes.empty()) {
        out["notes"] = row.notes;
    }
    return out;
}

json thresholds_json(const std::vector<PartitionThreshold>& th) {
    json out = json::array();
    for (const PartitionThreshold& t : th) {
        out.push_back({{"criterion", t.criterion}, {"value", t.value}});
    }
    return out;
}

OracleCheck oracle_check(const ScenarioConfig& config, Mode problem, std::uint64_t seed,
                         std::size_t samples) {
    const Scenario sc = materialize(config);
    const OracleSettings os = oracle_settings(config);
    OracleCheck out;
    json& rep = out.report;
    bool ok = true;

    const McReport base = mc_estimate(sc, 0.0, 1.0, samples, seed);
    rep["mc_base"] = mc_json(base);
    ok = ok && base.agrees();

    double e_star = 0.0;
    json grid;
    if (problem == Mode::MoralHazard) {
        const MoralHazardResult r = solve_moral_hazard(sc);
        const GridResult g = grid_search_moral_hazard(sc);
        e_star = r.e_star;
        const bool agrees = r.objective <= g.value + 1e-6 * (1.0 + std::abs(g.value));
        grid = {{"solver", {{"e", r.e_star}, {"alpha", r.alpha_star}, {"objective", r.objective}}},
                {"grid", {{"e", g.e}, {"alpha", g.alpha}, {"objective", g.value}, {"e_step", g.e_step}}},
                {"agrees", agrees}};
        ok = ok && agrees;
    } else {
        const SolveResult r = solve(sc);
        const GridResult g =
            grid_search(sc, 0.0, coercive_effort_bound(sc), os.grid_e_steps, os.grid_alpha_steps);
        e_star = r.e_star;
        const bool agrees = r.objective <= g.value + 1e-6 * std::abs(g.value);
        grid = {{"solver", {{"e", r.e_star}, {"alpha", r.alpha_star}, {"objective", r.objective}}},
                {"grid",
                 {{"e", g.e},
                  {"alpha", g.alpha},
                  {"objective", g.value},
                  {"e_step", g.e_step},
                  {"alpha_step", g.alpha_step}}},
                {"agrees", agrees}};
        ok = ok && agrees;
    }
    rep["grid"] = grid;

    json deriv;
    const auto check = [&](const char* name, DerivativeQuantity q) {
        const DerivativeReport d = derivative_check(sc, e_star, q);
        deriv[name] = derivative_json(d);
        ok = ok && (d.inconclusive || d.agrees);
    };
    check("rho", DerivativeQuantity::Rho);
    if (problem == Mode::MoralHazard) {
        if (e_star > 0.0) {
            check("L", DerivativeQuantity::L);
        }
    } else {
        check("K", DerivativeQuantity::K);
    }
    rep["derivatives"] = deriv;
    rep["agrees"] = ok;
    out.agrees = ok;
    return out;
}

}  // namespace preventix
