// SPDX-License-Identifier: MIT
#include "preventix/config.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"
#include "preventix/outer_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace preventix {

namespace {

using nlohmann::json;

const std::map<std::string, std::string> kSweepPaths = {
    {"theta1", "/premium/theta1"}, {"theta2", "/premium/theta2"}, {"beta", "/risk_measure/beta"},
    {"r", "/risk_measure/r"},      {"kappa", "/cost/kappa"},      {"gamma1", "/prevention/gamma1"},
    {"gamma2", "/prevention/gamma2"}, {"xhat", "/severity/xhat"},  {"k", "/severity/k"}};

const std::map<std::string, std::set<std::string>> kBlockKeys = {
    {"severity", {"family", "xhat", "k"}},
    {"prevention", {"family", "gamma1", "gamma2"}},
    {"cost", {"family", "kappa"}},
    {"premium", {"family", "theta1", "theta2", "theta", "delta"}},
    {"risk_measure", {"kind", "beta", "r"}},
    {"solver",
     {"e_max", "interior_grid", "effort_tol", "moral_hazard_grid", "alpha_tol", "grid_e_steps",
      "grid_alpha_steps", "samples"}},
    {"sweep", {"parameter", "from", "to", "steps"}},
};

const std::set<std::string> kTopKeys = {"mode",  "severity", "prevention", "cost",
                                        "premium", "risk_measure", "solver", "sweep",
                                        "seed",  "description"};

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

const json& block(const json& doc, const char* name) {
    if (!doc.contains(name) || !doc.at(name).is_object()) {
        throw ValidationError(std::string("missing block: ") + name);
    }
    return doc.at(name);
}

double number(const json& blk, const char* block_name, const char* key) {
    if (!blk.contains(key)) {
        throw ValidationError(std::string(block_name) + "." + key + ": missing");
    }
    const json& v = blk.at(key);
    if (!v.is_number()) {
        throw ValidationError(std::string(block_name) + "." + key + ": expected a number");
    }
    return v.get<double>();
}

double number_or(const json& blk, const char* key, double fallback) {
    if (!blk.contains(key)) {
        return fallback;
    }
    if (!blk.at(key).is_number()) {
        throw ValidationError(std::string("solver.") + key + ": expected a number");
    }
    return blk.at(key).get<double>();
}

std::string text_or(const json& blk, const char* block_name, const char* key,
                    const std::string& fallback) {
    if (!blk.contains(key)) {
        return fallback;
    }
    if (!blk.at(key).is_string()) {
        throw ValidationError(std::string(block_name) + "." + key + ": expected a string");
    }
    return blk.at(key).get<std::string>();
}

json normalized_solver(const json& doc) {
    const SolverOptions d;
    const OracleSettings o;
    const json s = doc.contains("solver") ? doc.at("solver") : json::object();
    if (!s.is_object()) {
        throw ValidationError("solver: expected an object");
    }
    json out = json::object();
    out["e_max"] = number_or(s, "e_max", d.e_max);
    out["interior_grid"] = static_cast<int>(number_or(s, "interior_grid", d.interior_grid));
    out["effort_tol"] = number_or(s, "effort_tol", d.effort_tol);
    out["moral_hazard_grid"] =
        static_cast<int>(number_or(s, "moral_hazard_grid", d.moral_hazard_grid));
    out["alpha_tol"] = number_or(s, "alpha_tol", d.alpha_tol);
    out["grid_e_steps"] = static_cast<int>(number_or(s, "grid_e_steps", o.grid_e_steps));
    out["grid_alpha_steps"] =
        static_cast<int>(number_or(s, "grid_alpha_steps", o.grid_alpha_steps));
    out["samples"] = static_cast<std::uint64_t>(number_or(s, "samples", static_cast<double>(o.samples)));
    return out;
}

void collect_unknown(const json& doc, std::vector<std::string>& warnings) {
    for (const auto& [key, value] : doc.items()) {
        if (!kTopKeys.count(key)) {
            warnings.push_back("unknown key: " + key);
            continue;
        }
        const auto it = kBlockKeys.find(key);
        if (it == kBlockKeys.end() || !value.is_object()) {
            continue;
        }
        for (const auto& [sub, unused] : value.items()) {
            (void)unused;
            if (!it->second.count(sub)) {
                warnings.push_back("unknown key: " + key + "." + sub);
            }
        }
    }
}

void check_sweep_parameter(const ScenarioConfig& c) {
    if (!c.sweep) {
        return;
    }
    const std::string& p = c.sweep->parameter;
    if (!kSweepPaths.count(p)) {
        throw ValidationError("sweep.parameter: unknown parameter '" + p + "'");
    }
    const std::string kind = c.model.at("risk_measure").value("kind", "");
    const std::string fam = c.model.at("premium").value("family", "quadratic");
    if (p == "beta" && kind != "tvar") {
        throw ValidationError("sweep.parameter: beta requires the tvar risk measure");
    }
    if (p == "r" && kind != "power") {
        throw ValidationError("sweep.parameter: r requires the power risk measure");
    }
    if ((p == "theta1" || p == "theta2") && fam != "quadratic") {
        throw ValidationError("sweep.parameter: " + p + " requires the quadratic premium");
    }
    if (c.sweep->steps < 1) {
        throw ValidationError("sweep.steps: must be at least 1");
    }
    if (!std::isfinite(c.sweep->from) || !std::isfinite(c.sweep->to)) {
        throw ValidationError("sweep: from and to must be finite");
    }
}

json model_at(const ScenarioConfig& c, const std::string& parameter, double value) {
    json m = c.model;
    m[json::json_pointer(kSweepPaths.at(parameter))] = value;
    return m;
}

void finish(ScenarioConfig& c) {
    check_sweep_parameter(c);
    const Scenario base = build_scenario(c.model);
    c.report = validate_model(base, c.mode);
    for (const AssumptionCheck& chk : c.report) {
        if (!chk.passed && chk.fatal) {
            throw ValidationError(chk.assumption + ": " + chk.property + " violated" +
                                  (chk.detail.empty() ? "" : " (" + chk.detail + ")"));
        }
    }
    if (c.sweep) {
        for (double v : {c.sweep->from, c.sweep->to}) {
            try {
                const Scenario s = build_scenario(model_at(c, c.sweep->parameter, v));
                if (!s.premium.strictly_convex()) {
                    c.warnings.push_back("premium is not strictly convex at " + c.sweep->parameter +
                                         " = " + std::to_string(v));
                }
            } catch (const Error& err) {
                throw ValidationError("sweep endpoint " + c.sweep->parameter + " = " +
                                      std::to_string(v) + ": " + err.what());
            }
        }
    }
    for (const AssumptionCheck& chk : c.report) {
        if (!chk.passed) {
            c.warnings.push_back(chk.assumption + ": " + chk.property + " not satisfied" +
                                 (chk.detail.empty() ? "" : " (" + chk.detail + ")"));
        }
    }
}

ScenarioConfig from_document(const json& doc) {
    if (!doc.is_object()) {
        throw ValidationError("scenario must be a JSON object");
    }
    ScenarioConfig c;
    collect_unknown(doc, c.warnings);
    c.mode = parse_mode(doc.contains("mode") ? doc.at("mode").get<std::string>() : "solve");
    c.model = json::object();
    for (const char* name : {"severity", "prevention", "cost", "premium", "risk_measure"}) {
        c.model[name] = block(doc, name);
    }
    c.model["solver"] = normalized_solver(doc);
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        if (!s.is_object()) {
            throw ValidationError("sweep: expected an object");
        }
        SweepSpec sw;
        sw.parameter = text_or(s, "sweep", "parameter", "");
        sw.from = number(s, "sweep", "from");
        sw.to = number(s, "sweep", "to");
        const double steps = number(s, "sweep", "steps");
        if (steps != std::floor(steps)) {
            throw ValidationError("sweep.steps: must be an integer");
        }
        sw.steps = static_cast<int>(steps);
        c.sweep = sw;
    } else if (c.mode == Mode::Sweep) {
        throw ValidationError("sweep mode requires a sweep block");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw ValidationError("seed: expected a non-negative integer");
        }
        c.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("description")) {
        c.description = doc.at("description").get<std::string>();
    }
    return c;
}

}  // namespace

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::Solve:
            return "solve";
        case Mode::Sweep:
            return "sweep";
        case Mode::MoralHazard:
            return "moral_hazard";
        case Mode::OracleCheck:
            return "oracle_check";
    }
    return "?";
}

Mode parse_mode(const std::string& text) {
    if (text == "solve") {
        return Mode::Solve;
    }
    if (text == "sweep") {
        return Mode::Sweep;
    }
    if (text == "moral_hazard" || text == "moral-hazard") {
        return Mode::MoralHazard;
    }
    if (text == "oracle_check" || text == "oracle-check") {
        return Mode::OracleCheck;
    }
    throw ValidationError("mode: unknown value '" + text + "'");
}

ScenarioConfig parse(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ValidationError(source + ":" + line_col(text, err.byte) + ": parse error: " +
                              err.what());
    }
    try {
        ScenarioConfig c = from_document(doc);
        finish(c);
        return c;
    } catch (const json::exception& err) {
        throw ValidationError(source + ": " + err.what());
    } catch (const ValidationError& err) {
        throw ValidationError(source + ": " + err.what());
    } catch (const Error& err) {
        throw ValidationError(source + ": " + err.what());
    }
}

ScenarioConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(path + ": cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

json to_json(const ScenarioConfig& c) {
    json out = c.model;
    out["mode"] = to_string(c.mode);
    out["seed"] = c.seed;
    if (!c.description.empty()) {
        out["description"] = c.description;
    }
    if (c.sweep) {
        out["sweep"] = {{"parameter", c.sweep->parameter},
                        {"from", c.sweep->from},
                        {"to", c.sweep->to},
                        {"steps", c.sweep->steps}};
    }
    return out;
}

void apply_override(ScenarioConfig& c, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override '" + assignment + "': expected key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }
    json doc = to_json(c);
    if (kSweepPaths.count(key)) {
        doc[json::json_pointer(kSweepPaths.at(key))] = value;
    } else if (key == "mode" || key == "seed" || key == "description") {
        doc[key] = value;
    } else {
        std::string pointer = "/" + key;
        std::replace(pointer.begin(), pointer.end(), '.', '/');
        doc[json::json_pointer(pointer)] = value;
    }
    std::vector<std::string> kept = c.overrides;
    ScenarioConfig next = parse(doc.dump(), "override " + key);
    for (const std::string& w : next.warnings) {
        if (w.rfind("unknown key", 0) == 0) {
            throw ValidationError("override '" + assignment + "': " + w);
        }
    }
    next.overrides = std::move(kept);
    next.overrides.push_back(assignment);
    c = std::move(next);
}

namespace {

// Re-throws constructor validation failures under the assumption they break.
template <class F>
auto named(const char* assumption, F&& make) {
    try {
        return make();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(assumption) + ": " + e.what());
    }
}

}  // namespace

Scenario build_scenario(const json& model) {
    const json& sev = block(model, "severity");
    const std::string sfam = text_or(sev, "severity", "family", "pareto");
    if (sfam != "pareto") {
        throw ValidationError("severity.family: only 'pareto' is configurable");
    }
    const double k = number(sev, "severity", "k");
    if (!(k > 2.0)) {
        throw ValidationError("severity.k: must exceed 2, second moment undefined");
    }
    Severity y = Severity::pareto(number(sev, "severity", "xhat"), k);

    const json& pv = block(model, "prevention");
    if (text_or(pv, "prevention", "family", "hyperbolic") != "hyperbolic") {
        throw ValidationError("prevention.family: only 'hyperbolic' is configurable");
    }
    const double gamma1 = number(pv, "prevention", "gamma1");
    const double gamma2 = number(pv, "prevention", "gamma2");
    LossProbability p =
        named("loss_probability", [&] { return LossProbability::hyperbolic(gamma1, gamma2); });

    const json& cb = block(model, "cost");
    if (text_or(cb, "cost", "family", "quadratic") != "quadratic") {
        throw ValidationError("cost.family: only 'quadratic' is configurable");
    }
    const double kappa = number(cb, "cost", "kappa");
    EffortCost cost = named("effort_cost", [&] { return EffortCost::quadratic(kappa); });

    const json& pb = block(model, "premium");
    const std::string pfam = text_or(pb, "premium", "family", "quadratic");
    std::optional<Premium> pp;
    if (pfam == "quadratic") {
        const double t1 = number(pb, "premium", "theta1");
        const double t2 = number(pb, "premium", "theta2");
        pp = named("premium_convexity", [&] { return Premium::quadratic(t1, t2); });
    } else if (pfam == "stop_loss") {
        const double theta = number(pb, "premium", "theta");
        const double delta = number(pb, "premium", "delta");
        pp = named("premium_convexity", [&] { return Premium::stop_loss(theta, delta); });
    } else {
        throw ValidationError("premium.family: unknown family '" + pfam + "'");
    }

    const json& rb = block(model, "risk_measure");
    const std::string kind = text_or(rb, "risk_measure", "kind", "");
    std::optional<DistortionMeasure> m;
    if (kind == "tvar") {
        const double beta = number(rb, "risk_measure", "beta");
        m = named("distortion_concavity", [&] { return DistortionMeasure::tvar(beta); });
    } else if (kind == "power") {
        const double r = number(rb, "risk_measure", "r");
        if (!(r > 0.0 && r < 1.0)) {
            throw ValidationError("risk_measure.r: must lie in (0, 1)");
        }
        if (!(k * r > 1.0)) {
            throw ValidationError("risk_measure.r: k * r <= 1, infinite risk measure");
        }
        m = DistortionMeasure::power(r);
    } else {
        throw ValidationError("risk_measure.kind: expected 'tvar' or 'power'");
    }

    SolverOptions opts;
    if (model.contains("solver")) {
        const json& s = model.at("solver");
        opts.e_max = number_or(s, "e_max", opts.e_max);
        opts.interior_grid = static_cast<int>(number_or(s, "interior_grid", opts.interior_grid));
        opts.effort_tol = number_or(s, "effort_tol", opts.effort_tol);
        opts.moral_hazard_grid =
            static_cast<int>(number_or(s, "moral_hazard_grid", opts.moral_hazard_grid));
        opts.alpha_tol = number_or(s, "alpha_tol", opts.alpha_tol);
        if (opts.interior_grid < 3 || opts.moral_hazard_grid < 8 || !(opts.effort_tol > 0.0) ||
            !(opts.alpha_tol > 0.0) || opts.e_max < 0.0) {
            throw ValidationError("solver: grid sizes and tolerances must be positive");
        }
    }
    return Scenario{MixtureLoss{Prevention{p, cost}, y}, *pp, *m, opts};
}

ValidationReport validate_model(const Scenario& sc, Mode mode) {
    ValidationReport out = sc.mixture.prevention.validate();
    out.push_back({"premium_convexity", "h strictly convex", sc.premium.strictly_convex(), false,
                   sc.premium.describe()});
    out.push_back({"distortion_concavity", "g concave", sc.measure.concave(), true,
                   sc.measure.describe()});
    if (!sc.is_tvar()) {
        out.push_back({"distortion_concavity", "g strictly concave", sc.measure.strictly_concave(),
                       false, sc.measure.describe()});
    }
    out.push_back({"risk_convexity",
                   sc.is_tvar() ? "p(e) times the upper quantile integral convex on [0, e_beta]"
                                : "rho_g(X_e) convex in e",
                   check_risk_convexity(sc), false, ""});
    if (mode == Mode::MoralHazard) {
        // rho must be non-increasing and convex on each smooth piece.
        const double eb = sc.e_beta();
        const double hi = 10.0 * std::max(eb, sc.mixture.prevention.p.effort_scale());
        bool decreasing = true;
        bool convex = true;
        std::vector<std::pair<double, double>> pieces;
        if (sc.is_tvar() && eb > 0.0) {
            pieces = {{0.0, eb}, {eb, hi}};
        } else {
            pieces = {{0.0, hi}};
        }
        for (const auto& [a, b] : pieces) {
            const auto xs = numerics::linspace(a, b, 500);
            std::vector<double> v;
            for (double x : xs) {
                v.push_back(x == b && b == eb ? sc.rho(std::nextafter(eb, 0.0)) : sc.rho(x));
            }
            for (std::size_t i = 1; i < v.size(); ++i) {
                if (v[i] > v[i - 1] + 1e-12) {
                    decreasing = false;
                }
                if (i + 1 < v.size() && v[i + 1] - 2.0 * v[i] + v[i - 1] < -1e-10 * (1.0 + v[0])) {
                    convex = false;
                }
            }
        }
        out.push_back({"moral_hazard_risk", "rho non-increasing in e", decreasing, true, ""});
        out.push_back({"moral_hazard_risk", "rho convex on each smooth piece", convex, false, ""});
    }
    return out;
}

Scenario materialize(const ScenarioConfig& c) { return build_scenario(c.model); }

double sweep_value(const ScenarioConfig& c, int index) {
    if (!c.sweep) {
        throw PreconditionError("configuration has no sweep block");
    }
    if (index < 0 || index >= c.sweep->steps) {
        throw PreconditionError("sweep index out of range");
    }
    if (c.sweep->steps == 1) {
        return c.sweep->from;
    }
    if (index == c.sweep->steps - 1) {
        return c.sweep->to;
    }
    return c.sweep->from + index * (c.sweep->to - c.sweep->from) / (c.sweep->steps - 1);
}

Scenario materialize(const ScenarioConfig& c, int index) {
    return materialize_at(c, sweep_value(c, index));
}

Scenario materialize_at(const ScenarioConfig& c, double value) {
    if (!c.sweep) {
        throw PreconditionError("configuration has no sweep block");
    }
    return build_scenario(model_at(c, c.sweep->parameter, value));
}

double base_value(const ScenarioConfig& c, const std::string& parameter) {
    const auto it = kSweepPaths.find(parameter);
    if (it == kSweepPaths.end()) {
        throw PreconditionError("unknown parameter '" + parameter + "'");
    }
    return c.model.at(json::json_pointer(it->second)).get<double>();
}

OracleSettings oracle_settings(const ScenarioConfig& c) {
    OracleSettings o;
    const json& s = c.model.at("solver");
    o.grid_e_steps = s.at("grid_e_steps").get<int>();
    o.grid_alpha_steps = s.at("grid_alpha_steps").get<int>();
    o.samples = s.at("samples").get<std::size_t>();
    return o;
}

}  // namespace preventix
