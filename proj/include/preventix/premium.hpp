// SPDX-License-Identifier: MIT
#pragma once

#include "preventix/prevention.hpp"
#include "preventix/severity.hpp"

#include <string>

namespace preventix {

/// Convex premium principle pi(I) = E[h(I)] with h(0) = 0 and h(x) >= x.
class Premium {
public:
    enum class Family { Quadratic, StopLoss };

    /// h(x) = (1 + theta1) x + theta2 x^2. theta2 == 0 is the expected-value
    /// principle, accepted but not strictly convex.
    static Premium quadratic(double theta1, double theta2);
    /// h(x) = x + theta (x - delta)_+.
    static Premium stop_loss(double theta, double delta);

    Family family() const { return family_; }
    double theta1() const { return theta1_; }
    double theta2() const { return theta2_; }
    double theta() const { return theta1_; }
    double delta() const { return delta_; }

    double h(double x) const;
    /// Right derivative of h.
    double h_prime(double x) const;
    double h_prime_at_zero() const { return h_prime(0.0); }
    bool strictly_convex() const { return family_ == Family::Quadratic && theta2_ > 0.0; }

    /// E[h(alpha Y)].
    double expected_h(const Severity& y, double alpha) const;
    /// E[Y h'(alpha Y)].
    double expected_y_h_prime(const Severity& y, double alpha) const;

    std::string describe() const;

private:
    Premium() = default;

    Family family_ = Family::Quadratic;
    double theta1_ = 0.0;
    double theta2_ = 0.0;
    double delta_ = 0.0;
};

/// E[h(alpha X_e)] = p(e) E[h(alpha Y)].
double premium(const Premium& pp, const MixtureLoss& mixture, double e, double alpha);

/// E[X_e h'(alpha X_e)] = p(e) E[Y h'(alpha Y)].
double weighted_loss(const Premium& pp, const MixtureLoss& mixture, double e, double alpha);

}  // namespace preventix
