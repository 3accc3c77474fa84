// SPDX-License-Identifier: MIT
#include "preventix/premium.hpp"

#include "preventix/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace preventix {

namespace {

void check_share(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("share alpha must lie in [0, 1]");
    }
}

// E[(Y - d)_+] and E[Y 1{Y >= d}] from the tail integral.
double stop_loss_transform(const Severity& y, double d) {
    const double s = y.survival(d);
    return y.tail_integral(1.0 - s, 1.0) - d * s;
}

double upper_partial_mean(const Severity& y, double d) {
    return y.tail_integral(1.0 - y.survival(d), 1.0);
}

}  // namespace

Premium Premium::quadratic(double theta1, double theta2) {
    if (!(theta1 >= 0.0) || !(theta2 >= 0.0) || !std::isfinite(theta1) ||
        !std::isfinite(theta2)) {
        throw ValidationError("quadratic premium: theta1 and theta2 must be non-negative");
    }
    Premium pp;
    pp.family_ = Family::Quadratic;
    pp.theta1_ = theta1;
    pp.theta2_ = theta2;
    return pp;
}

Premium Premium::stop_loss(double theta, double delta) {
    if (!(theta >= 0.0) || !(delta > 0.0) || !std::isfinite(theta) || !std::isfinite(delta)) {
        throw ValidationError("stop-loss premium: need theta >= 0 and delta > 0");
    }
    Premium pp;
    pp.family_ = Family::StopLoss;
    pp.theta1_ = theta;
    pp.delta_ = delta;
    return pp;
}

double Premium::h(double x) const {
    if (!(x >= 0.0)) {
        throw DomainError("h: argument must be non-negative");
    }
    if (family_ == Family::Quadratic) {
        return (1.0 + theta1_) * x + theta2_ * x * x;
    }
    return x + theta1_ * std::max(0.0, x - delta_);
}

double Premium::h_prime(double x) const {
    if (!(x >= 0.0)) {
        throw DomainError("h_prime: argument must be non-negative");
    }
    if (family_ == Family::Quadratic) {
        return 1.0 + theta1_ + 2.0 * theta2_ * x;
    }
    return x >= delta_ ? 1.0 + theta1_ : 1.0;
}

double Premium::expected_h(const Severity& y, double alpha) const {
    check_share(alpha);
    if (alpha == 0.0) {
        return 0.0;
    }
    if (family_ == Family::Quadratic) {
        return (1.0 + theta1_) * alpha * y.mean() + theta2_ * alpha * alpha * y.second_moment();
    }
    return alpha * y.mean() + theta1_ * alpha * stop_loss_transform(y, delta_ / alpha);
}

double Premium::expected_y_h_prime(const Severity& y, double alpha) const {
    check_share(alpha);
    if (family_ == Family::Quadratic) {
        return (1.0 + theta1_) * y.mean() + 2.0 * theta2_ * alpha * y.second_moment();
    }
    if (alpha == 0.0) {
        return y.mean();
    }
    return y.mean() + theta1_ * upper_partial_mean(y, delta_ / alpha);
}

std::string Premium::describe() const {
    std::ostringstream os;
    if (family_ == Family::Quadratic) {
        os << "quadratic(theta1=" << theta1_ << ", theta2=" << theta2_ << ")";
    } else {
        os << "stop_loss(theta=" << theta1_ << ", delta=" << delta_ << ")";
    }
    return os.str();
}

double premium(const Premium& pp, const MixtureLoss& mixture, double e, double alpha) {
    return mixture.p(e) * pp.expected_h(mixture.severity, alpha);
}

double weighted_loss(const Premium& pp, const MixtureLoss& mixture, double e, double alpha) {
    return mixture.p(e) * pp.expected_y_h_prime(mixture.severity, alpha);
}

}  // namespace preventix
