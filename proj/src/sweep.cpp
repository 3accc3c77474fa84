// SPDX-License-Identifier: MIT
#include "preventix/sweep.hpp"

#include "preventix/error.hpp"
#include "preventix/moral_hazard.hpp"
#include "preventix/numerics.hpp"
#include "preventix/outer_solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace preventix {

namespace {

struct Criterion {
    const char* name;
    std::function<double(const Scenario&)> f;
};

std::vector<Criterion> criteria(bool tvar) {
    std::vector<Criterion> out = {
        {"G1(0)=h'(0)", [](const Scenario& s) { return g1(s, 0.0) - s.premium.h_prime_at_zero(); }},
        {"G2(0)=1", [](const Scenario& s) { return g2(s, 0.0) - 1.0; }},
    };
    if (tvar) {
        out.push_back({"G1(e_beta)=h'(0)", [](const Scenario& s) {
                           return g1(s, s.e_beta()) - s.premium.h_prime_at_zero();
                       }});
        out.push_back({"G2(e_beta)=1", [](const Scenario& s) { return g2(s, s.e_beta()) - 1.0; }});
    }
    return out;
}

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + "\"";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(path + ": cannot open for writing");
    }
    out << text;
    if (!out) {
        throw Error(path + ": write failed");
    }
}

double column_value(const SweepRow& r, const std::string& column) {
    if (column == "e_star") {
        return r.e_star;
    }
    if (column == "alpha_star") {
        return r.alpha_star;
    }
    if (column == "objective") {
        return r.objective;
    }
    throw PreconditionError("svg: unknown column '" + column + "'");
}

}  // namespace

const char* const kCsvHeader =
    "index,parameter,value,e_star,alpha_star,objective,case_label,e_G1,e_G2,e_beta,e_B,"
    "corner_taken";

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::vector<PartitionThreshold> partition_thresholds(const ScenarioConfig& config,
                                                     int scan_points) {
    if (!config.sweep) {
        throw PreconditionError("partition_thresholds: configuration has no sweep block");
    }
    const SweepSpec& sw = *config.sweep;
    const bool tvar = materialize(config).is_tvar();
    const auto crit = criteria(tvar);
    const auto xs = numerics::linspace(sw.from, sw.to, static_cast<std::size_t>(std::max(2, scan_points)));

    // values[i][j]: criterion j at scan point i (NaN where the model is invalid).
    std::vector<std::vector<double>> values(xs.size(), std::vector<double>(crit.size(), NAN));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            const Scenario sc = materialize_at(config, xs[i]);
            for (std::size_t j = 0; j < crit.size(); ++j) {
                values[i][j] = crit[j].f(sc);
            }
        } catch (const Error&) {
        }
    }
    std::vector<PartitionThreshold> out;
    for (std::size_t j = 0; j < crit.size(); ++j) {
        const auto f = [&](double v) { return crit[j].f(materialize_at(config, v)); };
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double a = values[i - 1][j];
            const double b = values[i][j];
            if (std::isnan(a) || std::isnan(b)) {
                continue;
            }
            if (b == 0.0) {
                out.push_back({crit[j].name, xs[i]});
            } else if (a != 0.0 && (a < 0.0) != (b < 0.0)) {
                out.push_back({crit[j].name, numerics::bisect(f, xs[i - 1], xs[i], 1e-10)});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const PartitionThreshold& x, const PartitionThreshold& y) { return x.value < y.value; });
    return out;
}

SweepRow solve_row(const Scenario& sc, Mode mode) {
    SweepRow row;
    if (mode == Mode::MoralHazard) {
        const MoralHazardResult r = solve_moral_hazard(sc);
        row.e_star = r.e_star;
        row.alpha_star = r.alpha_star;
        row.objective = r.objective;
        row.case_label = classify_case(sc);
        if (sc.is_tvar()) {
            row.e_beta = sc.e_beta();
        }
        row.e_B = r.e_B;
        row.corner_taken = r.corner_taken;
        row.failure = r.diagnostics.failure;
        row.notes = r.diagnostics.notes;
        return row;
    }
    const SolveResult r = solve(sc);
    row.e_star = r.e_star;
    row.alpha_star = r.alpha_star;
    row.objective = r.objective;
    row.case_label = r.case_label;
    row.e_G1 = r.thresholds.e_G1;
    row.e_G2 = r.thresholds.e_G2;
    row.e_beta = r.thresholds.e_beta;
    row.failure = r.diagnostics.failure;
    row.notes = r.diagnostics.notes;
    return row;
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PREVENTIX_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) {
            n = std::min(n, static_cast<unsigned>(cap));
        }
    }
    return n;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, Mode mode, unsigned threads) {
    if (!config.sweep) {
        throw PreconditionError("run_sweep: configuration has no sweep block");
    }
    const int n = config.sweep->steps;
    std::vector<SweepRow> rows(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    const auto work = [&]() {
        for (int i = next++; i < n; i = next++) {
            SweepRow row;
            const double v = sweep_value(config, i);
            try {
                row = solve_row(materialize_at(config, v), mode);
            } catch (const Error& err) {
                row.failure = true;
                row.notes.push_back(err.what());
            }
            row.index = i;
            row.parameter = config.sweep->parameter;
            row.value = v;
            rows[static_cast<std::size_t>(i)] = std::move(row);
        }
    };
    const unsigned t = std::min<unsigned>(threads == 0 ? worker_count() : threads,
                                          static_cast<unsigned>(std::max(1, n)));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < t; ++k) {
        pool.emplace_back(work);
    }
    work();
    for (auto& th : pool) {
        th.join();
    }
    return rows;
}

std::string csv_text(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        os << r.index << ',' << csv_field(r.parameter) << ',' << opt(r.value) << ','
           << format_double(r.e_star) << ',' << format_double(r.alpha_star) << ','
           << format_double(r.objective) << ',' << csv_field(r.case_label) << ',' << opt(r.e_G1)
           << ',' << opt(r.e_G2) << ',' << opt(r.e_beta) << ',' << opt(r.e_B) << ','
           << (r.corner_taken ? (*r.corner_taken ? "true" : "false") : "") << '\n';
    }
    return os.str();
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.empty()) {
        throw PreconditionError("emit_csv: no rows");
    }
    write_file(path, csv_text(rows));
}

std::string svg_text(const std::vector<SweepRow>& rows, const std::string& column,
                     const std::vector<PartitionThreshold>& markers) {
    if (rows.empty()) {
        throw PreconditionError("svg: no rows");
    }
    constexpr double W = 720.0, H = 420.0, L = 70.0, R = 20.0, T = 40.0, B = 50.0;
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    bool first = true;
    for (const SweepRow& r : rows) {
        const double x = r.value.value_or(r.index);
        const double y = column_value(r, column);
        if (!std::isfinite(y)) {
            continue;
        }
        if (first) {
            x0 = x1 = x;
            y0 = y1 = y;
            first = false;
        }
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 == x0) {
        x1 = x0 + 1.0;
    }
    const double pad = y1 > y0 ? 0.05 * (y1 - y0) : 0.5;
    y0 -= pad;
    y1 += pad;
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const std::string param = rows.front().parameter.empty() ? "index" : rows.front().parameter;
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << column
       << " vs " << param << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        os << "<line x1=\"" << fixed(px(xv), 2) << "\" y1=\"" << H - B << "\" x2=\""
           << fixed(px(xv), 2) << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fixed(px(xv), 2) << "\" y=\"" << H - B + 18
           << "\" text-anchor=\"middle\">" << fixed(xv, 3) << "</text>\n";
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << fixed(py(yv), 2) << "\" x2=\"" << L
           << "\" y2=\"" << fixed(py(yv), 2) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << L - 8 << "\" y=\"" << fixed(py(yv) + 4, 2)
           << "\" text-anchor=\"end\">" << fixed(yv, 4) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
       << param << "</text>\n";
    for (const PartitionThreshold& m : markers) {
        if (m.value < x0 || m.value > x1) {
            continue;
        }
        os << "<line x1=\"" << fixed(px(m.value), 2) << "\" y1=\"" << T << "\" x2=\""
           << fixed(px(m.value), 2) << "\" y2=\"" << H - B
           << "\" stroke=\"#c0392b\" stroke-dasharray=\"4 3\"/>\n";
        os << "<text x=\"" << fixed(px(m.value) + 3, 2) << "\" y=\"" << T + 10
           << "\" fill=\"#c0392b\" font-size=\"9\">" << fixed(m.value, 3) << "</text>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    bool sep = false;
    for (const SweepRow& r : rows) {
        const double y = column_value(r, column);
        if (!std::isfinite(y)) {
            continue;
        }
        os << (sep ? " " : "") << fixed(px(r.value.value_or(r.index)), 2) << ',' << fixed(py(y), 2);
        sep = true;
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

void emit_svg(const std::vector<SweepRow>& rows, const std::string& column,
              const std::string& path, const std::vector<PartitionThreshold>& markers) {
    write_file(path, svg_text(rows, column, markers));
}

}  // namespace preventix
