// SPDX-License-Identifier: MIT
// preventix <solve|sweep|moral-hazard|oracle-check> --config PATH [--out DIR]
//           [--set K=V]... [--seed N] [--samples N]

#include "preventix/error.hpp"
#include "preventix/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace preventix;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw Error(path.string() + ": cannot write");
    }
}

int run(Mode mode, const std::string& config_path, const fs::path& out_dir,
        const std::vector<std::string>& sets, const std::optional<std::uint64_t>& seed,
        const std::optional<std::size_t>& samples) {
    ScenarioConfig cfg = load(config_path);
    const bool file_moral_hazard = cfg.mode == Mode::MoralHazard;
    for (const std::string& s : sets) {
        apply_override(cfg, s);
    }
    if (seed) {
        apply_override(cfg, "seed=" + std::to_string(*seed));
    }
    if (samples) {
        apply_override(cfg, "solver.samples=" + std::to_string(*samples));
    }
    cfg.mode = mode;
    for (const std::string& w : cfg.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    if (mode == Mode::MoralHazard) {
        const ValidationReport rep = validate_model(materialize(cfg), mode);
        for (const AssumptionCheck& c : rep) {
            if (!c.passed) {
                const std::string msg = c.assumption + ": " + c.property + " fails";
                if (c.fatal) {
                    throw ValidationError(msg);
                }
                std::cerr << "warning: " << msg << '\n';
            }
        }
    }
    fs::create_directories(out_dir);

    json doc;
    doc["metadata"] = metadata(cfg, mode);
    bool failure = false;

    if (mode == Mode::OracleCheck) {
        const Mode problem = file_moral_hazard ? Mode::MoralHazard : Mode::Solve;
        const OracleCheck oc =
            oracle_check(cfg, problem, cfg.seed, oracle_settings(cfg).samples);
        doc["oracle"] = oc.report;
        doc["agrees"] = oc.agrees;
        write_text(out_dir / "oracle_report.json", doc.dump(2) + "\n");
        std::cout << doc.dump(2) << '\n';
        return oc.agrees ? 0 : 2;
    }

    std::vector<SweepRow> rows;
    const bool sweeping = (mode == Mode::Sweep || mode == Mode::MoralHazard) && cfg.sweep;
    if (mode == Mode::Sweep && !cfg.sweep) {
        throw ValidationError("sweep mode needs a sweep block");
    }
    if (sweeping) {
        const std::vector<PartitionThreshold> th = partition_thresholds(cfg);
        rows = run_sweep(cfg, mode);
        doc["thresholds"] = thresholds_json(th);
        json jr = json::array();
        for (const SweepRow& r : rows) {
            jr.push_back(row_json(r));
            failure = failure || r.failure;
        }
        doc["rows"] = jr;
        std::vector<PartitionThreshold> markers = th;
        emit_svg(rows, "e_star", (out_dir / "e_star.svg").string(), markers);
        emit_svg(rows, "alpha_star", (out_dir / "alpha_star.svg").string(), markers);
    } else {
        const Scenario sc = materialize(cfg);
        SweepRow row = solve_row(sc, mode);
        if (mode == Mode::MoralHazard) {
            const MoralHazardResult r = solve_moral_hazard(sc);
            doc["result"] = result_json(r);
            doc["result"]["case_label"] = row.case_label;
        } else {
            doc["result"] = result_json(solve(sc));
        }
        failure = row.failure;
        rows.push_back(std::move(row));
    }
    emit_csv(rows, (out_dir / "results.csv").string());
    write_text(out_dir / "results.json", doc.dump(2) + "\n");
    if (!sweeping) {
        std::cout << doc["result"].dump(2) << '\n';
    } else {
        std::cout << rows.size() << " rows written to " << out_dir.string() << '\n';
    }
    for (const SweepRow& r : rows) {
        if (r.failure) {
            std::cerr << "diagnostic failure at index " << r.index;
            for (const std::string& n : r.notes) {
                std::cerr << "; " << n;
            }
            std::cerr << '\n';
        }
    }
    return failure ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal insurance and self-protection under distortion risk measures"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;

    const std::vector<std::pair<const char*, Mode>> modes = {
        {"solve", Mode::Solve},
        {"sweep", Mode::Sweep},
        {"moral-hazard", Mode::MoralHazard},
        {"oracle-check", Mode::OracleCheck}};
    for (const auto& [name, m] : modes) {
        CLI::App* sub = app.add_subcommand(name, std::string("run in ") + name + " mode");
        sub->add_option("--config", config_path, "scenario JSON file")->required();
        sub->add_option("--out", out_dir, "output directory (default: .)");
        sub->add_option("--set", sets, "override a scalar field, e.g. theta1=2");
        sub->add_option("--seed", seed, "Monte-Carlo seed");
        sub->add_option("--samples", samples, "Monte-Carlo sample count");
    }
    CLI11_PARSE(app, argc, argv);

    Mode mode = Mode::Solve;
    for (const auto& [name, m] : modes) {
        if (app.got_subcommand(name)) {
            mode = m;
        }
    }
    try {
        return run(mode, config_path, out_dir, sets, seed, samples);
    } catch (const SolverFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
