#pragma once

#include <stdexcept>
#include <string>

namespace decotunnel {

// Invalid input values (negative barrier strength, lambda outside [0,1], ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Transfer matrix requested for a fully opaque barrier (q == 0).
struct SingularBarrierError : DomainError {
    using DomainError::DomainError;
};

// Numerical failure (non-convergence, solver breakdown). Carries context in what().
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dispersion residual evaluated inside the guard band of a cotangent pole.
struct PoleError : NumericError {
    using NumericError::NumericError;
};

// Integrator step size violates its stated precondition.
struct StepSizeError : NumericError {
    using NumericError::NumericError;
};

// ABL rule with pre/post-selected states orthogonal in both sections.
struct UndefinedSelectionError : NumericError {
    using NumericError::NumericError;
};

// Hybrid simulation horizon too short to produce a usable fit.
struct InsufficientEventsError : NumericError {
    using NumericError::NumericError;
};

// Appendix-B solution requested at b0 == 0.
struct DegenerateFrequencyError : NumericError {
    using NumericError::NumericError;
};

// Configuration file failed to parse or validate.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace decotunnel
