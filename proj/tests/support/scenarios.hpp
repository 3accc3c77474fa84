// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/config.hpp"

#include <string>

namespace testing {

inline std::string fixture(const std::string& name) {
    return std::string(PREVENTIX_FIXTURE_DIR) + "/" + name + ".json";
}

/// Scenario of the theta1 fixture with theta1 overridden.
inline preventix::Scenario theta1_case(double theta1) {
    return preventix::materialize_at(preventix::load(fixture("sec5_1_1")), theta1);
}

inline preventix::Scenario make(double xhat, double k, double g1, double g2, double kappa,
                                double t1, double t2, preventix::DistortionMeasure m) {
    using namespace preventix;
    return Scenario{MixtureLoss{Prevention{LossProbability::hyperbolic(g1, g2), EffortCost::quadratic(kappa)},
                                Severity::pareto(xhat, k)},
                    Premium::quadratic(t1, t2), m, SolverOptions{}};
}

}  // namespace testing
