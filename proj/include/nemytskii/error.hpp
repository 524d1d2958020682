#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nemytskii {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model configuration (m <= 1, 2ζ/m >= 1, non-monotone β table, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (mass mismatch, missing samples).
class InputError : public Error {
public:
    using Error::Error;
};

/// Nonlinear solve failure inside the implicit scheme.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, std::size_t step = 0)
        : Error(what), residual_(residual), step_(step) {}

    double residual() const noexcept { return residual_; }
    std::size_t step() const noexcept { return step_; }

private:
    double residual_;
    std::size_t step_;
};

/// Particle simulation failure (non-finite position, blow-up watchdog).
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, std::size_t particle)
        : Error(what), particle_(particle) {}

    std::size_t particle() const noexcept { return particle_; }

private:
    std::size_t particle_;
};

}  // namespace nemytskii
