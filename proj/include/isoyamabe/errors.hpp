#pragma once

#include <stdexcept>
#include <string>

namespace isoyamabe {

/// Base class for all errors thrown by the solver library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem parameters violate a structural constraint; the message names it.
struct InvalidSpecError : Error {
    using Error::Error;
};

/// Invalid argument to an operation (bad bracket, bad grid, bad pairing, ...).
struct InvalidArgumentError : Error {
    using Error::Error;
};

/// Adaptive integration could not continue. Carries the last good state.
struct IntegrationError : Error {
    double r_last, w_last, wp_last;
    IntegrationError(const std::string& msg, double r, double w, double wp)
        : Error(msg), r_last(r), w_last(w), wp_last(wp) {}
};

/// refine_zero called on an interval without a sign change.
struct BracketError : Error {
    using Error::Error;
};

/// No admissible angle lift; signals a zero-count/quadrant mismatch.
struct LiftError : Error {
    using Error::Error;
};

/// Direct zero count disagrees with the floor-formula count.
struct CountMismatchError : Error {
    using Error::Error;
};

/// Curve-scan refinement exceeded its sample budget.
struct ScanBudgetError : Error {
    using Error::Error;
};

/// A scan did not reach the requested winding angle. Carries attained range.
struct ScanRangeError : Error {
    double attained_lo, attained_hi;
    ScanRangeError(const std::string& msg, double lo, double hi)
        : Error(msg), attained_lo(lo), attained_hi(hi) {}
};

/// Newton refinement diverged or stagnated above tolerance for this seed.
struct SeedRejectedError : Error {
    using Error::Error;
};

/// A refined match does not carry the prescribed number of zeroes.
struct WrongBranchError : Error {
    using Error::Error;
};

/// No seed produced a verified solution within the scan budget.
struct NotFoundError : Error {
    using Error::Error;
};

/// Energy quadrature requested outside the ell=2 geometry.
struct UnsupportedGeometryError : Error {
    using Error::Error;
};

}  // namespace isoyamabe
