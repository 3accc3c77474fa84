// SPDX-License-Identifier: MIT
#include "preventix/error.hpp"
#include "preventix/inner_solver.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

#include <doctest.h>

#include <cmath>

using namespace preventix;
using doctest::Approx;

TEST_CASE("threshold statistics at the base point") {
    const Scenario sc = testing::theta1_case(4.5);
    CHECK(g1(sc, 0.0) == Approx(6.11829619308309).epsilon(1e-13));
    // G2 = rho / (p E[Y h'(Y)]) with E[Y h'(Y)] = 5.5 E[Y] + 0.2 E[Y^2].
    CHECK(g2(sc, 0.0) == Approx(7.34195543169971 / 8.04).epsilon(1e-12));
}

TEST_CASE("G1 exceeds G2 for strictly convex premiums") {
    for (double t1 : {0.0, 4.5, 12.0}) {
        const Scenario sc = testing::theta1_case(t1);
        for (double e = 0.0; e < 400.0; e += 7.3) {
            CHECK(g1(sc, e) > g2(sc, e));
        }
    }
}

TEST_CASE("optimal share against a direct minimisation over alpha") {
    const oracle::Model m{{2.0, 2.5}, 9.0, 25.0, 0.1, 4.5, 0.1};
    const double m1 = oracle::moment(m.y, 1);
    const double m2 = oracle::moment(m.y, 2);
    const Scenario sc = testing::theta1_case(4.5);
    for (double e : {0.0, 0.5, 1.0, 2.0, 5.0, 30.0}) {
        const auto ref = oracle::best_alpha(m, e, m1, m2);
        CHECK(optimal_share(sc, e).alpha == Approx(ref.first).epsilon(1e-7));
    }
}

TEST_CASE("share branches") {
    CHECK(optimal_share(testing::theta1_case(2.0), 1.0).branch == ShareDecision::Branch::Full);
    CHECK(optimal_share(testing::theta1_case(10.0), 1.0).branch == ShareDecision::Branch::Null);
    const auto d = optimal_share(testing::theta1_case(4.5), 1.0);
    CHECK(d.branch == ShareDecision::Branch::Interior);
    CHECK(d.alpha > 0.0);
    CHECK(d.alpha < 1.0);
}

TEST_CASE("solve_alpha_h matches the first-order condition") {
    const Scenario sc = testing::theta1_case(4.5);
    const double e = 1.0;
    const double a = solve_alpha_h(sc, e);
    // p E[Y h'(a Y)] = rho at the interior optimum.
    CHECK(sc.p(e) * sc.premium.expected_y_h_prime(sc.mixture.severity, a) == Approx(sc.rho(e)).epsilon(1e-10));
    CHECK_THROWS_AS(solve_alpha_h(testing::theta1_case(2.0), 1.0), PreconditionError);
}

TEST_CASE("alpha_for_psi closed form and bisection agree") {
    const Premium pp = Premium::quadratic(1.0, 0.3);
    const Severity y = Severity::pareto(1.0, 4.0);
    for (double psi : {2.2, 2.5, 3.0}) {
        CHECK(alpha_for_psi(pp, y, psi, 1e-13) == Approx(alpha_for_psi(pp, y, psi, 1e-13, true)).epsilon(1e-10));
    }
}

TEST_CASE("alpha is continuous and non-decreasing in e") {
    for (double t1 : {4.5, 10.0, 18.5}) {
        const Scenario sc = testing::theta1_case(t1);
        double prev = optimal_share(sc, 0.0).alpha;
        for (double e = 0.05; e < 300.0; e += 0.05) {
            const double a = optimal_share(sc, e).alpha;
            CHECK(a >= prev - 1e-12);
            CHECK(a - prev < 0.01);
            prev = a;
        }
    }
}

TEST_CASE("case classification across the theta1 sweep") {
    CHECK(classify_case(testing::theta1_case(2.0)) == "TVaR-i");
    CHECK(classify_case(testing::theta1_case(4.5)) == "TVaR-ii");
    CHECK(classify_case(testing::theta1_case(10.0)) == "TVaR-iv");
    CHECK(classify_case(testing::theta1_case(18.5)) == "TVaR-v");
    CHECK(classify_case(testing::theta1_case(19.5)) == "TVaR-vi");
}

TEST_CASE("effort thresholds") {
    const Scenario sc = testing::theta1_case(10.0);
    CHECK(solve_e_G1(sc) == Approx(41.4574471014070).epsilon(1e-10));
    const Scenario s2 = testing::theta1_case(4.5);
    const double eg2 = solve_e_G2(s2);
    CHECK(g2(s2, eg2) == Approx(1.0).epsilon(1e-9));
}
