// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace preventix {

/// One result line; optional columns stay empty in CSV when absent.
struct SweepRow {
    int index = 0;
    std::string parameter;
    std::optional<double> value;
    double e_star = 0.0;
    double alpha_star = 0.0;
    double objective = 0.0;
    std::string case_label;
    std::optional<double> e_G1;
    std::optional<double> e_G2;
    std::optional<double> e_beta;
    std::optional<double> e_B;
    std::optional<bool> corner_taken;
    bool failure = false;
    std::vector<std::string> notes;
};

/// A value of the swept parameter where the case partition changes.
struct PartitionThreshold {
    std::string criterion;  ///< e.g. "G2(0)=1"
    double value = 0.0;
};

/// Roots, over the sweep range, of G1(0) - h'(0), G1(e_beta) - h'(0),
/// G2(0) - 1 and G2(e_beta) - 1 (the e_beta pair only for TVaR). A scan of
/// scan_points brackets sign changes, which are bisected to 1e-10.
std::vector<PartitionThreshold> partition_thresholds(const ScenarioConfig& config,
                                                     int scan_points = 2001);

/// Solves one scenario in Solve/Sweep (observable effort) or MoralHazard mode.
SweepRow solve_row(const Scenario& sc, Mode mode);

/// Runs every sweep index on a worker pool; rows come back in index order.
/// threads == 0 means worker_count().
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, Mode mode, unsigned threads = 0);

/// Hardware concurrency, capped by the PREVENTIX_THREADS environment variable.
unsigned worker_count();

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

extern const char* const kCsvHeader;

std::string csv_text(const std::vector<SweepRow>& rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Self-contained SVG line plot of column ("e_star", "alpha_star" or
/// "objective") against the swept value, with vertical threshold markers.
std::string svg_text(const std::vector<SweepRow>& rows, const std::string& column,
                     const std::vector<PartitionThreshold>& markers = {});
void emit_svg(const std::vector<SweepRow>& rows, const std::string& column,
              const std::string& path, const std::vector<PartitionThreshold>& markers = {});

}  // namespace preventix
