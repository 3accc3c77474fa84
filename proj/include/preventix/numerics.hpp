// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace preventix::numerics {

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson quadrature of f over [a, b].
///
/// Subdivides until the Richardson-corrected local error is below
/// rel_tol * |running estimate| (plus a tiny absolute floor), or the
/// recursion depth reaches max_depth.
double adaptive_simpson(const ScalarFn& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 48);

/// Same as adaptive_simpson but splits [a, b] at the given interior points
/// first (points outside (a, b) are ignored).
double adaptive_simpson_split(const ScalarFn& f, double a, double b,
                              const std::vector<double>& breaks,
                              double rel_tol = 1e-10, int max_depth = 48);

/// Bisection root of f on [lo, hi]. Requires f(lo) and f(hi) of opposite
/// sign (or one of them zero). Stops when hi - lo <= x_tol.
double bisect(const ScalarFn& f, double lo, double hi, double x_tol,
              int max_iter = 400);

struct Minimum {
    double x;
    double value;
};

/// Golden-section minimisation of a unimodal f on [a, b] to bracket width x_tol.
/// The endpoints are included as candidates.
Minimum golden_section(const ScalarFn& f, double a, double b, double x_tol,
                       int max_iter = 300);

/// Central-difference derivative with one Richardson extrapolation step
/// (steps h and h/2). Falls back to a one-sided stencil when x - h < lower.
double richardson_derivative(const ScalarFn& f, double x, double h,
                             double lower = -1e300);

/// n equally spaced points from a to b inclusive (n >= 2), or {a} when n == 1.
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace preventix::numerics
