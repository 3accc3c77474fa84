// SPDX-License-Identifier: MIT
#include "preventix/prevention.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace preventix {

namespace {

void check_effort(double e) {
    if (!(e >= 0.0)) {
        throw DomainError("effort must be non-negative");
    }
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

LossProbability LossProbability::hyperbolic(double gamma1, double gamma2) {
    if (!(gamma1 > 0.0) || !(gamma2 > gamma1) || !std::isfinite(gamma2)) {
        throw ValidationError("hyperbolic loss probability: need 0 < gamma1 < gamma2");
    }
    LossProbability lp;
    lp.family_ = Family::Hyperbolic;
    lp.name_ = "hyperbolic";
    lp.gamma1_ = gamma1;
    lp.gamma2_ = gamma2;
    return lp;
}

LossProbability LossProbability::custom(std::function<double(double)> p,
                                        std::function<double(double)> p_prime,
                                        double limit_at_infinity, std::string name) {
    if (!p || !p_prime) {
        throw ValidationError("custom loss probability: p and p' are required");
    }
    LossProbability lp;
    lp.family_ = Family::Custom;
    lp.name_ = std::move(name);
    lp.limit_ = limit_at_infinity;
    lp.p_ = std::move(p);
    lp.p_prime_ = std::move(p_prime);
    // Use p(0) / |p'(0)| as the effort scale of a custom family.
    const double slope = std::abs(lp.p_prime_(0.0));
    lp.gamma2_ = slope > 0.0 ? std::max(1e-6, lp.p_(0.0) / slope) : 1.0;
    lp.gamma1_ = lp.p_(0.0) * lp.gamma2_;
    return lp;
}

double LossProbability::operator()(double e) const {
    check_effort(e);
    if (family_ == Family::Hyperbolic) {
        return gamma1_ / (gamma2_ + e);
    }
    return p_(e);
}

double LossProbability::prime(double e) const {
    check_effort(e);
    if (family_ == Family::Hyperbolic) {
        const double d = gamma2_ + e;
        return -gamma1_ / (d * d);
    }
    return p_prime_(e);
}

double LossProbability::inverse(double level) const {
    if ((*this)(0.0) <= level) {
        return 0.0;
    }
    if (family_ == Family::Hyperbolic) {
        return gamma1_ / level - gamma2_;
    }
    if (level <= limit_) {
        throw DomainError("loss probability never reaches the requested level");
    }
    double hi = effort_scale();
    int guard = 0;
    while ((*this)(hi) > level) {
        hi *= 2.0;
        if (++guard > 200) {
            throw SolverFailure("loss probability inverse: no bracket");
        }
    }
    return numerics::bisect([&](double e) { return (*this)(e) - level; }, 0.0, hi,
                            1e-14 * std::max(1.0, hi));
}

double LossProbability::effort_scale() const { return gamma2_; }

EffortCost EffortCost::quadratic(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ValidationError("quadratic effort cost: kappa must be positive");
    }
    EffortCost c;
    c.family_ = Family::Quadratic;
    c.name_ = "quadratic";
    c.kappa_ = kappa;
    return c;
}

EffortCost EffortCost::custom(std::function<double(double)> c,
                              std::function<double(double)> c_prime, std::string name) {
    if (!c || !c_prime) {
        throw ValidationError("custom effort cost: c and c' are required");
    }
    EffortCost out;
    out.family_ = Family::Custom;
    out.name_ = std::move(name);
    out.c_ = std::move(c);
    out.c_prime_ = std::move(c_prime);
    return out;
}

double EffortCost::operator()(double e) const {
    check_effort(e);
    if (family_ == Family::Quadratic) {
        return kappa_ * e * e;
    }
    return c_(e);
}

double EffortCost::prime(double e) const {
    check_effort(e);
    if (family_ == Family::Quadratic) {
        return 2.0 * kappa_ * e;
    }
    return c_prime_(e);
}

double EffortCost::inverse(double level) const {
    if (level <= 0.0) {
        return 0.0;
    }
    if (family_ == Family::Quadratic) {
        return std::sqrt(level / kappa_);
    }
    double hi = 1.0;
    int guard = 0;
    while ((*this)(hi) < level) {
        hi *= 2.0;
        if (++guard > 200) {
            throw SolverFailure("effort cost inverse: cost is bounded");
        }
    }
    return numerics::bisect([&](double e) { return (*this)(e) - level; }, 0.0, hi,
                            1e-14 * std::max(1.0, hi));
}

bool has_fatal(const ValidationReport& report) {
    return std::any_of(report.begin(), report.end(),
                       [](const AssumptionCheck& c) { return !c.passed && c.fatal; });
}

ValidationReport Prevention::validate() const {
    ValidationReport out;
    const double hi = 10.0 * p.effort_scale();
    const auto grid = numerics::linspace(0.0, hi, 1000);

    const double p0 = p(0.0);
    out.push_back({"loss_probability", "p(0) in (0, 1)", p0 > 0.0 && p0 < 1.0, true,
                   "p(0) = " + fmt(p0)});

    bool decreasing = true;
    bool convex = true;
    bool strictly_convex = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (p(grid[i]) > p(grid[i - 1])) {
            decreasing = false;
        }
        if (i + 1 < grid.size()) {
            const double d2 = p(grid[i + 1]) - 2.0 * p(grid[i]) + p(grid[i - 1]);
            if (d2 < -1e-14) {
                convex = false;
            }
            if (!(d2 > 0.0)) {
                strictly_convex = false;
            }
        }
    }
    out.push_back({"loss_probability", "p non-increasing", decreasing, true, ""});
    out.push_back({"loss_probability", "p convex", convex, true, ""});
    // Non-strict convexity is only a warning.
    out.push_back({"loss_probability", "p strictly convex", strictly_convex, false, ""});
    out.push_back({"loss_probability", "p'(0) < 0", p.prime(0.0) < 0.0, true,
                   "p'(0) = " + fmt(p.prime(0.0))});
    const bool limit_zero = p.family() == LossProbability::Family::Hyperbolic ||
                            p.limit_at_infinity() == 0.0;
    out.push_back({"loss_probability", "p(inf) = 0", limit_zero, true, ""});

    bool c_increasing = true;
    bool c_convex = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (cost(grid[i]) < cost(grid[i - 1])) {
            c_increasing = false;
        }
        if (i + 1 < grid.size()) {
            const double d2 = cost(grid[i + 1]) - 2.0 * cost(grid[i]) + cost(grid[i - 1]);
            if (!(d2 > 0.0)) {
                c_convex = false;
            }
        }
    }
    out.push_back({"effort_cost", "c(0) = 0", cost(0.0) == 0.0, true,
                   "c(0) = " + fmt(cost(0.0))});
    out.push_back({"effort_cost", "c'(0) = 0", std::abs(cost.prime(0.0)) < 1e-8, true,
                   "c'(0) = " + fmt(cost.prime(0.0))});
    out.push_back({"effort_cost", "c non-decreasing", c_increasing, true, ""});
    out.push_back({"effort_cost", "c strictly convex", c_convex, true, ""});
    // c(inf) = inf holds for the quadratic family; custom families are trusted
    // only if the cost keeps growing over the check grid.
    const bool c_unbounded = cost.family() == EffortCost::Family::Quadratic ||
                             cost(hi) > cost(0.5 * hi);
    out.push_back({"effort_cost", "c(inf) = inf", c_unbounded, true, ""});
    return out;
}

double MixtureLoss::e_beta(double beta) const {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("e_beta: beta must lie in (0, 1)");
    }
    return prevention.p.inverse(1.0 - beta);
}

double MixtureLoss::survival(double e, double x) const {
    if (x < 0.0) {
        return 1.0;
    }
    return p(e) * severity.survival(x);
}

bool fsd_check(const MixtureLoss& mixture, double e1, double e2, int grid_size) {
    if (!(e1 >= 0.0) || !(e2 >= 0.0)) {
        throw DomainError("fsd_check: efforts must be non-negative");
    }
    if (grid_size < 2) {
        grid_size = 2;
    }
    const double lo = std::log(0.5 * mixture.severity.lower_support());
    const double hi = std::log(mixture.severity.quantile(1.0 - 1e-9));
    for (double lx : numerics::linspace(lo, hi, static_cast<std::size_t>(grid_size))) {
        const double x = std::exp(lx);
        if (mixture.survival(e1, x) < mixture.survival(e2, x)) {
            return false;
        }
    }
    return true;
}

}  // namespace preventix
