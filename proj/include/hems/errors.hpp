#pragma once

#include <stdexcept>
#include <string>

namespace hems {

// Scenario or run configuration breaks a documented invariant. The CLI maps
// this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A caller-supplied control, schedule or start time violates a physical bound.
class ConstraintViolation : public std::runtime_error {
public:
    explicit ConstraintViolation(const std::string& what) : std::runtime_error(what) {}
};

// The zero coefficient vector is infeasible for the constraint set just built,
// e.g. leakage alone drives the battery below its floor within the horizon.
// Carries the label of the violated row.
class InfeasibleScenario : public std::runtime_error {
public:
    InfeasibleScenario(const std::string& what, std::string violated_row)
        : std::runtime_error(what), violated_row_(std::move(violated_row)) {}
    const std::string& violated_row() const noexcept { return violated_row_; }

private:
    std::string violated_row_;
};

// A solver produced no usable plan during a simulation. The CLI maps this to
// exit code 3.
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hems
