// SPDX-License-Identifier: MIT
#include "preventix/config.hpp"
#include "preventix/error.hpp"
#include "support/scenarios.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace preventix;
using doctest::Approx;
using nlohmann::json;

namespace {

json base_doc() {
    return json::parse(R"({
      "mode": "solve",
      "severity": {"family": "pareto", "xhat": 2, "k": 2.5},
      "prevention": {"family": "hyperbolic", "gamma1": 9, "gamma2": 25},
      "cost": {"family": "quadratic", "kappa": 0.1},
      "premium": {"family": "quadratic", "theta1": 4.5, "theta2": 0.1},
      "risk_measure": {"kind": "tvar", "beta": 0.95}
    })");
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("every reference fixture loads") {
    for (const char* name : {"sec5_1_1", "sec5_1_2", "sec5_1_3", "sec5_2_1", "sec5_2_2", "sec5_2_3",
                             "sec6_1", "sec6_2", "sec6_3"}) {
        CAPTURE(name);
        const ScenarioConfig c = load(testing::fixture(name));
        CHECK(c.sweep.has_value());
        CHECK_FALSE(has_fatal(c.report));
    }
    CHECK(load(testing::fixture("sec5_1_1")).warnings.empty());
    CHECK(load(testing::fixture("sec6_1")).mode == Mode::MoralHazard);
}

TEST_CASE("named validation errors") {
    json d = base_doc();
    d["severity"]["k"] = 1.5;
    CHECK(error_of(d.dump()).find("second moment") != std::string::npos);

    d = base_doc();
    d["severity"] = {{"family", "pareto"}, {"xhat", 1}, {"k", 1.6}};
    d["risk_measure"] = {{"kind", "power"}, {"r", 0.5}};
    CHECK_THROWS_AS(parse(d.dump()), ValidationError);

    d = base_doc();
    d["severity"]["k"] = 3.2;
    d["risk_measure"] = {{"kind", "power"}, {"r", 0.25}};
    CHECK(error_of(d.dump()).find("infin") != std::string::npos);

    d = base_doc();
    d["prevention"]["gamma1"] = 30;
    CHECK(error_of(d.dump()).find("loss_probability") != std::string::npos);

    d = base_doc();
    d["sweep"] = {{"parameter", "r"}, {"from", 0.5}, {"to", 0.9}, {"steps", 5}};
    CHECK_THROWS_AS(parse(d.dump()), ValidationError);

    d = base_doc();
    d["sweep"] = {{"parameter", "theta1"}, {"from", 0}, {"to", 1}, {"steps", 0}};
    CHECK_THROWS_AS(parse(d.dump()), ValidationError);

    d = base_doc();
    d.erase("premium");
    CHECK(error_of(d.dump()).find("premium") != std::string::npos);
}

TEST_CASE("parse errors carry a position") {
    const std::string msg = error_of("{\n  \"mode\": \"solve\",\n  \"severity\": {,}\n}");
    CHECK(msg.find("3:") != std::string::npos);
}

TEST_CASE("malformed inputs give named errors, not crashes") {
    for (const char* text : {"", "[]", "null", "{\"severity\": 3}", "{\"mode\": 7}", "{\"mode\": \"fly\"}",
                             "{\"severity\": {\"family\": \"pareto\", \"xhat\": \"two\", \"k\": 3}}"}) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse(text), Error);
    }
}

TEST_CASE("unknown keys warn") {
    json d = base_doc();
    d["severity"]["shape"] = 1;
    d["colour"] = "blue";
    const ScenarioConfig c = parse(d.dump());
    CHECK(c.warnings.size() == 2);
}

TEST_CASE("load, serialise, load is the identity") {
    for (const char* name : {"sec5_1_1", "sec5_2_3", "sec6_3"}) {
        const ScenarioConfig a = load(testing::fixture(name));
        const ScenarioConfig b = parse(to_json(a).dump());
        CHECK(to_json(a) == to_json(b));
        CHECK(a.mode == b.mode);
        CHECK(a.seed == b.seed);
        CHECK(a.sweep->steps == b.sweep->steps);
    }
}

TEST_CASE("materialize") {
    const ScenarioConfig c = load(testing::fixture("sec5_1_1"));
    CHECK(sweep_value(c, 82) == Approx(4.1).epsilon(1e-15));
    CHECK(materialize(c, 82).premium.theta1() == Approx(4.1).epsilon(1e-15));
    CHECK(sweep_value(c, 0) == 0.0);
    CHECK(sweep_value(c, 400) == 20.0);
    CHECK_THROWS_AS(materialize(c, 401), PreconditionError);

    json d = base_doc();
    d["sweep"] = {{"parameter", "beta"}, {"from", 0.9}, {"to", 0.99}, {"steps", 2}};
    const ScenarioConfig b = parse(d.dump());
    CHECK(materialize(b, 0).measure.beta() == 0.9);
    CHECK(materialize(b, 1).measure.beta() == 0.99);
    CHECK(materialize(b, 0).e_beta() == Approx(9.0 / 0.1 - 25.0));
    CHECK(materialize(b, 1).e_beta() == Approx(9.0 / 0.01 - 25.0));
}

TEST_CASE("overrides") {
    ScenarioConfig c = load(testing::fixture("sec5_1_1"));
    apply_override(c, "theta1=2");
    apply_override(c, "solver.e_max=300");
    apply_override(c, "seed=9");
    CHECK(materialize(c).premium.theta1() == 2.0);
    CHECK(materialize(c).options.e_max == 300.0);
    CHECK(c.seed == 9);
    CHECK(c.overrides.size() == 3);
    CHECK_THROWS_AS(apply_override(c, "theta1"), ValidationError);
    CHECK_THROWS_AS(apply_override(c, "severity.k=1.5"), ValidationError);
    CHECK_THROWS_AS(apply_override(c, "k=1.5"), ValidationError);
    CHECK_THROWS_AS(apply_override(c, "bogus=1"), ValidationError);
    CHECK_THROWS_AS(apply_override(c, "premium.bogus=1"), ValidationError);
    CHECK(c.overrides.size() == 3);
    apply_override(c, "xhat=3");
    CHECK(materialize(c).mixture.severity.xhat() == 3.0);
}
