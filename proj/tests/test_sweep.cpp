// SPDX-License-Identifier: MIT
#include "preventix/error.hpp"
#include "preventix/report.hpp"
#include "preventix/sweep.hpp"
#include "support/scenarios.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace preventix;
using doctest::Approx;

namespace {

ScenarioConfig small_sweep(const char* name, int steps) {
    ScenarioConfig c = load(testing::fixture(name));
    c.sweep->steps = steps;
    return c;
}

}  // namespace

TEST_CASE("CSV layout") {
    const auto rows = run_sweep(small_sweep("sec5_1_1", 5), Mode::Sweep);
    const std::string csv = csv_text(rows);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == kCsvHeader);
    int n = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 11);
        ++n;
    }
    CHECK(n == 5);
    CHECK(csv.find("\n0,theta1,0,") != std::string::npos);
    CHECK(csv.find("\n4,theta1,20,") != std::string::npos);
}

TEST_CASE("columns stay in place across modes") {
    const auto a = csv_text(run_sweep(small_sweep("sec5_1_1", 3), Mode::Sweep));
    const auto b = csv_text(run_sweep(small_sweep("sec6_1", 3), Mode::MoralHazard));
    CHECK(a.substr(0, a.find('\n')) == b.substr(0, b.find('\n')));
    // Observable runs leave e_B and corner_taken empty; moral-hazard runs fill them.
    CHECK(a.find(",,\n") != std::string::npos);
    CHECK((b.find(",true\n") != std::string::npos || b.find(",false\n") != std::string::npos));
}

TEST_CASE("rows are ordered and identical whatever the thread count") {
    const ScenarioConfig c = small_sweep("sec5_1_3", 40);
    const auto one = csv_text(run_sweep(c, Mode::Sweep, 1));
    const auto many = csv_text(run_sweep(c, Mode::Sweep, 8));
    CHECK(one == many);
    const auto rows = run_sweep(c, Mode::Sweep, 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].index == static_cast<int>(i));
    }
}

TEST_CASE("results JSON is deterministic") {
    const ScenarioConfig c = small_sweep("sec6_2", 9);
    const auto a = run_sweep(c, Mode::MoralHazard);
    const auto b = run_sweep(c, Mode::MoralHazard);
    nlohmann::json ja, jb;
    for (const auto& r : a) ja.push_back(row_json(r));
    for (const auto& r : b) jb.push_back(row_json(r));
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(0.810584123567)) == 0.810584123567);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("partition thresholds of the theta1 sweep") {
    const auto th = partition_thresholds(load(testing::fixture("sec5_1_1")));
    REQUIRE(th.size() == 4);
    CHECK(th[0].criterion == "G2(0)=1");
    CHECK(th[1].criterion == "G1(0)=h'(0)");
    CHECK(th[2].criterion == "G2(e_beta)=1");
    CHECK(th[3].criterion == "G1(e_beta)=h'(0)");
    // Thresholds on G1 and G2 at fixed e differ by the constant theta2-loading gap.
    CHECK(th[1].value - th[0].value == Approx(1.2).epsilon(1e-8));
}

TEST_CASE("SVG output") {
    const auto rows = run_sweep(small_sweep("sec5_1_1", 21), Mode::Sweep);
    const std::vector<PartitionThreshold> marks = {{"a", 3.918}, {"b", 5.118}, {"out of range", 99.0}};
    const std::string svg = svg_text(rows, "alpha_star", marks);
    CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
    CHECK(svg.find("xlink") == std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("3.918") != std::string::npos);
    CHECK(svg.find("99.000") == std::string::npos);
    CHECK_THROWS_AS(svg_text({}, "e_star"), PreconditionError);
    CHECK_THROWS_AS(svg_text(rows, "nope"), PreconditionError);
}

TEST_CASE("emit rejects empty input and unwritable paths") {
    const auto rows = run_sweep(small_sweep("sec5_1_1", 2), Mode::Sweep);
    CHECK_THROWS_AS(emit_csv({}, "/tmp/x.csv"), PreconditionError);
    CHECK_THROWS_AS(emit_csv(rows, "/nonexistent-dir/x.csv"), Error);
    const auto path = std::filesystem::temp_directory_path() / "preventix_test.csv";
    emit_csv(rows, path.string());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == csv_text(rows));
    std::filesystem::remove(path);
}
