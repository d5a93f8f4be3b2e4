#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dshape {

/// Box and budget constraints of a continuous application admit no point.
class InfeasibleBudget : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A discrete application has no placement left before its deadline.
class EmptyFeasibleSet : public std::runtime_error {
public:
    explicit EmptyFeasibleSet(std::string da_id)
        : std::runtime_error("empty feasible set for application '" + da_id + "'"),
          id_(std::move(da_id)) {}

    const std::string& da_id() const noexcept { return id_; }

private:
    std::string id_;
};

/// An iterative solver stopped before reaching its tolerance. Carries the best
/// iterate found so callers may still use it.
class MaxItersExceeded : public std::runtime_error {
public:
    MaxItersExceeded(const std::string& what, Eigen::VectorXd best, double residual)
        : std::runtime_error(what), best_(std::move(best)), residual_(residual) {}

    const Eigen::VectorXd& best() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    Eigen::VectorXd best_;
    double residual_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class LengthMismatch : public std::runtime_error {
public:
    LengthMismatch(std::size_t expected, std::size_t actual)
        : std::runtime_error("expected " + std::to_string(expected) + " values, got "
                             + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// Relative gap requested against a reference with zero variance.
class ZeroReference : public std::runtime_error {
public:
    explicit ZeroReference(double absolute_gap)
        : std::runtime_error("reference objective is zero; relative gap undefined"),
          absolute_gap_(absolute_gap) {}

    double absolute_gap() const noexcept { return absolute_gap_; }

private:
    double absolute_gap_;
};

class MissingArrivalRecord : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario document (unknown keys, wrong types, bad lengths).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dshape
