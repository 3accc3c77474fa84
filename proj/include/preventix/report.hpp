// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/oracle.hpp"
#include "preventix/outer_solver.hpp"
#include "preventix/sweep.hpp"

#include <json.hpp>

namespace preventix {

inline constexpr const char* kVersion = "1.0.0";

/// Run metadata: tool version, mode, seed, the normalised config and overrides.
nlohmann::json metadata(const ScenarioConfig& config, Mode mode);

nlohmann::json result_json(const SolveResult& r);
nlohmann::json result_json(const MoralHazardResult& r);
nlohmann::json row_json(const SweepRow& row);
nlohmann::json thresholds_json(const std::vector<PartitionThreshold>& th);

struct OracleCheck {
    nlohmann::json report;
    bool agrees = false;
};

/// Monte Carlo at the base point (e, alpha) = (0, 1), the grid oracle against
/// the solver, and derivative checks at e*. problem selects the observable
/// (Solve) or moral-hazard (MoralHazard) formulation.
///
/// For k <= 4 the Y^2 terms have infinite variance, so the 3-sigma MC test
/// is a heuristic at any point; it is run only where the references are fixed.
OracleCheck oracle_check(const ScenarioConfig& config, Mode problem, std::uint64_t seed,
                         std::size_t samples);

}  // namespace preventix
