#pragma once

#include <stdexcept>
#include <string>

namespace sigmak {

/// Violated precondition on caller-supplied data (bad dimension, nonpositive u, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An argument left the admissible cone. `margin` is the offending cone margin.
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& what, double margin)
        : std::domain_error(what), margin_(margin) {}

    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

enum class FailureKind {
    ConeBoundary,
    PositivityLoss,
    StepUnderflow,
    MaxIterations,
    NoAdmissibleStep,
    SingularJacobian,
    PathFailure,
};

const char* to_string(FailureKind kind) noexcept;

/// A numerical procedure stopped before reaching its goal. `location` is a
/// radius or homotopy parameter, depending on the solver.
class SolverError : public std::runtime_error {
public:
    SolverError(FailureKind kind, const std::string& what, double location)
        : std::runtime_error(what), kind_(kind), location_(location) {}

    FailureKind kind() const noexcept { return kind_; }
    double location() const noexcept { return location_; }

private:
    FailureKind kind_;
    double location_;
};

}  // namespace sigmak
