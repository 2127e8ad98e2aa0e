#pragma once

#include <stdexcept>
#include <string>

namespace nearfield {

/// Base of every error thrown by the library. The exit code is what the CLI
/// reports when the error escapes a command.
class Error : public std::runtime_error
{
public:
    Error(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

/// Invalid physical input (non-positive mass, out-of-range fraction, ...).
class DomainError : public Error
{
public:
    explicit DomainError(const std::string& what) : Error(what, 2) {}
};

/// Scenario or schema problems.
class ConfigError : public Error
{
public:
    explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

class IoError : public Error
{
public:
    explicit IoError(const std::string& what) : Error(what, 3) {}
};

/// Quadrature, bisection or sampling failures. Carries the residual when one
/// is known.
class ConvergenceError : public Error
{
public:
    explicit ConvergenceError(const std::string& what, double residual = 0.0)
        : Error(what, 4), residual_(residual)
    {
    }
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

namespace detail {
inline void require(bool condition, const char* message)
{
    if (!condition) {
        throw DomainError(message);
    }
}
} // namespace detail

} // namespace nearfield
