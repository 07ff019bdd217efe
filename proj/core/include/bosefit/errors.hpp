#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bosefit {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Result would exceed the double range.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Adaptive quadrature (or a cross-check between two routes) failed to
/// reach the requested accuracy. Carries the best available estimate.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// Malformed input text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant (gap, overlap, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularJacobianError : public std::runtime_error {
public:
    SingularJacobianError(const std::string& what, double damping)
        : std::runtime_error(what), damping_(damping) {}

    double damping() const noexcept { return damping_; }

private:
    double damping_;
};

/// Data that cannot support an estimate (zero mean income, SS_tot = 0, ...).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bosefit
