// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/inner_solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace preventix {

enum class Mode { Solve, Sweep, MoralHazard, OracleCheck };

const char* to_string(Mode mode);
/// Accepts "solve", "sweep", "moral_hazard" / "moral-hazard",
/// "oracle_check" / "oracle-check".
Mode parse_mode(const std::string& text);

struct SweepSpec {
    std::string parameter;  ///< theta1, theta2, beta, r, kappa, gamma1 or gamma2
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
};

/// Oracle sizes read from the solver block.
struct OracleSettings {
    int grid_e_steps = 512;
    int grid_alpha_steps = 512;
    std::size_t samples = 1000000;
};

/// Parsed, normalised and validated scenario file.
struct ScenarioConfig {
    Mode mode = Mode::Solve;
    /// Model blocks: severity, prevention, cost, premium, risk_measure, solver.
    nlohmann::json model;
    std::optional<SweepSpec> sweep;
    std::uint64_t seed = 0;
    std::string description;

    /// "key=value" overrides applied after loading, in order.
    std::vector<std::string> overrides;
    std::vector<std::string> warnings;
    ValidationReport report;
};

/// Reads and validates a scenario file. Parse errors carry line and column.
ScenarioConfig load(const std::string& path);

/// Same as load for in-memory text; source names the origin in messages.
ScenarioConfig parse(const std::string& text, const std::string& source = "<string>");

/// Normalised JSON form; parse(to_json(c).dump()) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

/// Applies "key=value". key is a sweep parameter name, a dotted path such as
/// solver.e_max, or one of mode, seed, description. Re-validates.
void apply_override(ScenarioConfig& config, const std::string& assignment);

/// Scenario at the base (unswept) parameters.
Scenario materialize(const ScenarioConfig& config);

/// Scenario with the swept parameter at from + index (to - from) / (steps - 1).
Scenario materialize(const ScenarioConfig& config, int index);

/// Scenario with the swept parameter at an arbitrary value.
Scenario materialize_at(const ScenarioConfig& config, double value);

/// Value of the swept parameter at index.
double sweep_value(const ScenarioConfig& config, int index);

/// Base value of the swept parameter.
double base_value(const ScenarioConfig& config, const std::string& parameter);

OracleSettings oracle_settings(const ScenarioConfig& config);

/// Builds a scenario from the model blocks. Throws ValidationError.
Scenario build_scenario(const nlohmann::json& model);

/// Full assumption report for the model in the given mode.
ValidationReport validate_model(const Scenario& sc, Mode mode);

}  // namespace preventix
