// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace preventix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Configuration or model parameters that violate a model assumption.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The distortion risk measure of the loss is not finite.
class InfiniteRiskMeasure : public Error {
public:
    using Error::Error;
};

/// Caller violated an operation precondition (e.g. interior bracket for alpha).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A threshold root was requested but no sign change exists on the search interval.
class ThresholdAbsent : public Error {
public:
    using Error::Error;
};

/// Loss probability vanished numerically, so ratios such as G1/G2 are undefined.
class DegenerateEffort : public Error {
public:
    using Error::Error;
};

/// The measure is not supported by the case-split solvers (e.g. non-concave g).
class UnsupportedMeasure : public Error {
public:
    using Error::Error;
};

/// Numerical solver could not certify its answer (search cap reached, no root, ...).
class SolverFailure : public Error {
public:
    using Error::Error;
};

}  // namespace preventix
