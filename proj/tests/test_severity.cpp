// SPDX-License-Identifier: MIT
#include "preventix/error.hpp"
#include "preventix/severity.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace preventix;
using doctest::Approx;

TEST_CASE("pareto quantiles at reference levels") {
    const Severity y = Severity::pareto(2.0, 2.5);
    CHECK(y.quantile(0.95) == Approx(6.62890803467997).epsilon(1e-13));
    CHECK(Severity::pareto(1.0, 4.0).quantile(0.5) == Approx(1.18920711500272).epsilon(1e-13));
    CHECK(y.quantile(0.0) == 2.0);
    CHECK(y.lower_support() == 2.0);
}

TEST_CASE("pareto moments against quadrature") {
    for (double k : {2.5, 3.0, 4.0, 5.0}) {
        const Severity y = Severity::pareto(1.5, k);
        const oracle::Pareto o{1.5, k};
        CHECK(y.mean() == Approx(oracle::moment(o, 1)).epsilon(1e-9));
        CHECK(y.second_moment() == Approx(oracle::moment(o, 2)).epsilon(1e-8));
    }
}

TEST_CASE("pareto with k <= 2 is rejected") {
    CHECK_THROWS_AS(Severity::pareto(1.0, 1.5), ValidationError);
    CHECK_THROWS_AS(Severity::pareto(1.0, 2.0), ValidationError);
    CHECK_THROWS_AS(Severity::pareto(0.0, 3.0), ValidationError);
}

TEST_CASE("tail integral") {
    const Severity y = Severity::pareto(2.0, 2.5);
    CHECK(y.tail_integral(0.95, 1.0) == Approx(0.552409002889998).epsilon(1e-12));
    const oracle::Pareto o{2.0, 2.5};
    for (auto [a, b] : {std::pair{0.0, 0.3}, {0.2, 0.9}, {0.5, 1.0}}) {
        CHECK(y.tail_integral(a, b) == Approx(oracle::quantile_integral(o, a, b)).epsilon(1e-9));
    }
    CHECK(y.tail_integral(0.0, 1.0) == Approx(y.mean()).epsilon(1e-13));
}

TEST_CASE("generic tail quantile reproduces pareto") {
    const Severity ref = Severity::pareto(2.0, 3.0);
    const Severity gen = Severity::from_tail_quantile([](double v) { return 2.0 * std::pow(v, -1.0 / 3.0); });
    CHECK(gen.mean() == Approx(ref.mean()).epsilon(1e-9));
    CHECK(gen.second_moment() == Approx(ref.second_moment()).epsilon(1e-9));
    CHECK(gen.tail_integral(0.9, 1.0) == Approx(ref.tail_integral(0.9, 1.0)).epsilon(1e-9));
    CHECK(gen.survival(3.0) == Approx(ref.survival(3.0)).epsilon(1e-9));
}

TEST_CASE("ordinary quantile input with a power-law tail extension") {
    const Severity ref = Severity::pareto(2.0, 3.0);
    const Severity gen = Severity::from_quantile([](double u) { return 2.0 * std::pow(1.0 - u, -1.0 / 3.0); });
    CHECK(gen.mean() == Approx(ref.mean()).epsilon(1e-9));
    CHECK(gen.second_moment() == Approx(ref.second_moment()).epsilon(1e-8));
    CHECK_THROWS_AS(Severity::from_quantile([](double u) { return std::pow(1.0 - u, -1.0 / 1.8); }),
                    ValidationError);
    // Exponential law: the extension is a mild power law, moments stay close.
    const Severity ex = Severity::from_quantile([](double u) { return 1.0 - std::log1p(-u); });
    CHECK(ex.mean() == Approx(2.0).epsilon(1e-6));
    CHECK(ex.second_moment() == Approx(5.0).epsilon(1e-6));
}

TEST_CASE("generic severity with infinite second moment is rejected") {
    CHECK_THROWS_AS(Severity::from_tail_quantile([](double v) { return std::pow(v, -1.0 / 1.8); }),
                    ValidationError);
}

TEST_CASE("cdf and quantile are inverse") {
    const Severity y = Severity::pareto(2.0, 2.5);
    for (double u : {0.01, 0.3, 0.77, 0.999}) {
        CHECK(y.cdf(y.quantile(u)) == Approx(u).epsilon(1e-12));
        CHECK(y.survival(y.quantile(u)) == Approx(1.0 - u).epsilon(1e-10));
    }
    CHECK(y.cdf(1.0) == 0.0);
}

TEST_CASE("scaling multiplies quantiles and moments") {
    const Severity y = Severity::pareto(2.0, 2.5).scaled(0.4);
    CHECK(y.quantile(0.95) == Approx(0.4 * 6.62890803467997).epsilon(1e-12));
    CHECK(y.mean() == Approx(0.4 * 2.0 * 2.5 / 1.5).epsilon(1e-12));
    CHECK(y.second_moment() == Approx(0.16 * 4.0 * 2.5 / 0.5).epsilon(1e-12));
}

TEST_CASE("expectation of a kinked payoff") {
    const Severity y = Severity::pareto(1.0, 4.0);
    const double d = 1.7;
    const double got = y.expect([d](double x) { return std::max(x - d, 0.0); }, {d});
    // E[(Y - d)+] = xhat^k d^(1-k) / (k - 1)
    CHECK(got == Approx(std::pow(d, -3.0) / 3.0).epsilon(1e-9));
}
