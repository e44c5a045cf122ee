#pragma once

#include <stdexcept>
#include <string>

namespace pspectral {

/// Base class for runtime numerical failures (bracketing, convergence,
/// step-size control).  Input-validation problems throw
/// std::invalid_argument instead.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Adaptive step controller stalled; signals pathological parameters.
struct StepSizeUnderflow : NumericalError {
    explicit StepSizeUnderflow(const std::string& msg) : NumericalError(msg) {}
};

/// Phase never reached pi_p/2 before t_end; b(a) = infinity convention.
struct NoStationaryPoint : NumericalError {
    explicit NoStationaryPoint(const std::string& msg) : NumericalError(msg) {}
};

/// Odd shooting phase never crossed pi_p/2 (lambda <= lambda_0).
struct NoCrossing : NumericalError {
    explicit NoCrossing(const std::string& msg) : NumericalError(msg) {}
};

/// Eigenvalue bisection could not bracket the target.
struct BracketFailure : NumericalError {
    explicit BracketFailure(const std::string& msg) : NumericalError(msg) {}
};

/// No left endpoint a with m(a) = u_max was found.
struct RangeUnreachable : NumericalError {
    explicit RangeUnreachable(const std::string& msg) : NumericalError(msg) {}
};

/// Sampled function leaves the model range [w(a), w(b)].
struct RangeMismatch : NumericalError {
    explicit RangeMismatch(const std::string& msg) : NumericalError(msg) {}
};

/// Rayleigh quotient of the zero function requested.
struct ZeroFunction : NumericalError {
    explicit ZeroFunction(const std::string& msg) : NumericalError(msg) {}
};

/// Descent stalled with a large gradient.
struct NonConvergence : NumericalError {
    explicit NonConvergence(const std::string& msg) : NumericalError(msg) {}
};

/// tan_p evaluated at a zero of cos_p.
struct PoleError : NumericalError {
    explicit PoleError(const std::string& msg) : NumericalError(msg) {}
};

/// Surface parameters violate the cap/smoothing constraints.
struct SpecInfeasible : std::invalid_argument {
    explicit SpecInfeasible(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Bakry-Emery curvature condition fails on the constructed surface.
struct CurvatureViolated : NumericalError {
    explicit CurvatureViolated(const std::string& msg) : NumericalError(msg) {}
};

} // namespace pspectral
