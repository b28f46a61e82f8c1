#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <string>
#include <vector>

namespace ddvf {

/// Bad argument to a public operation (non-positive size, point outside the
/// reference square, unsupported rule order, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Isoparametric map with det J <= 0.
class DegenerateElement : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base for failures of the linear solve. The CLI maps these to exit code 2.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSystem : public SolverError {
public:
    SingularSystem(const std::string& what, std::ptrdiff_t pivot)
        : SolverError(what), pivot_(pivot) {}

    /// Column at which the factorization broke down, or -1 if unknown.
    [[nodiscard]] std::ptrdiff_t pivot() const noexcept { return pivot_; }

private:
    std::ptrdiff_t pivot_;
};

class ConvergenceFailure : public SolverError {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : SolverError(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// All-Neumann flow problem whose sources do not integrate to zero.
class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One or more configuration values violate their constraints.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, std::vector<std::string> keys)
        : std::runtime_error(what), keys_(std::move(keys)) {}

    [[nodiscard]] const std::vector<std::string>& keys() const noexcept { return keys_; }

private:
    std::vector<std::string> keys_;
};

/// Config text that cannot be parsed: unknown key, bad type, bad value.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& what, const std::string& key, int line)
        : ValidationError(what, {key}), key_(key), line_(line) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ddvf
