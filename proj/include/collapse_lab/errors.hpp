#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collapse_lab {

/// Raised when a pair state is not normalized or carries non-finite amplitudes.
class InvalidStateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a step of the integrator loses control of the norm.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, std::size_t step, double time)
        : std::runtime_error(what), step_(step), time_(time) {}

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    std::size_t step_;
    double time_;
};

/// A trajectory inside an ensemble failed; carries enough to reproduce it.
class TrajectoryFailure : public std::runtime_error {
public:
    TrajectoryFailure(const std::string& what, std::size_t index, unsigned long long seed)
        : std::runtime_error(what), index_(index), seed_(seed) {}

    std::size_t trajectory_index() const noexcept { return index_; }
    unsigned long long seed() const noexcept { return seed_; }

private:
    std::size_t index_;
    unsigned long long seed_;
};

class InvalidDensityMatrixError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Configuration validation failure; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace collapse_lab
