#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pfim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square matrix, length mismatch, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain (non-finite entries, omega <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Dense solve hit a pivot below the singularity threshold.
class SingularSystemError : public Error {
public:
    SingularSystemError(std::size_t pivot, const std::string& what)
        : Error(what), pivot_(pivot) {}
    [[nodiscard]] std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// An iterative method ran out of budget (eigen-solver sweeps, Newton steps).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class CatalogError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class GridTooCoarseError : public Error {
public:
    using Error::Error;
};

/// The autonomous phase row vanishes: the trajectory is stationary at tau = 0.
class DegeneratePhaseError : public Error {
public:
    using Error::Error;
};

/// The bordered periodic boundary system is singular at a given iterate.
class BoundarySingularError : public Error {
public:
    BoundarySingularError(int iteration, const std::string& what)
        : Error(what), iteration_(iteration) {}
    [[nodiscard]] int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// The forward correction recursion failed to close over the period.
class PropagationError : public Error {
public:
    using Error::Error;
};

/// Explicit integration produced a non-finite state.
class BlowUpError : public Error {
public:
    BlowUpError(long step, const std::string& what) : Error(what), step_(step) {}
    [[nodiscard]] long step() const noexcept { return step_; }

private:
    long step_;
};

/// Long-run integration did not settle onto a periodic orbit.
class NotSettledError : public Error {
public:
    using Error::Error;
};

}  // namespace pfim
