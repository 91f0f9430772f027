#pragma once

#include <stdexcept>
#include <string>

namespace posefit {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Rotation angle at or near pi, where the Gibbs-vector extraction is singular.
class NearSingularRotation : public Error {
public:
    using Error::Error;
};

/// Point has non-positive depth in the camera frame.
class BehindCamera : public Error {
public:
    using Error::Error;
};

/// Fewer than the minimum number of features common to all observations.
class InsufficientFeatures : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Perturbation matrix B does not have full row rank.
class RankDeficientBatch : public Error {
public:
    using Error::Error;
};

/// Sampling failed to produce a rank-6 batch within the retry budget.
class DegenerateBatch : public Error {
public:
    using Error::Error;
};

/// Damped normal equations are singular (unobservable pose direction).
class SingularNormalEquations : public Error {
public:
    using Error::Error;
};

/// Initial guess shares fewer than 4 visible features with the reference.
class InitialGuessInfeasible : public Error {
public:
    using Error::Error;
};

/// Solve cannot proceed: re-initialization budget exhausted or persistent
/// batch degeneracy.
class Degenerate : public Error {
public:
    using Error::Error;
};

/// Random model generation kept producing coplanar point sets.
class DegenerateModel : public Error {
public:
    using Error::Error;
};

/// Config file is malformed or contains unknown fields.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Config file parsed but violates an invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace posefit
