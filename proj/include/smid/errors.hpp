#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or malformed input (bad order, bad bounds, bad file).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The simulated output exceeded the divergence cap.
class UnstableTrajectory : public Error {
public:
    UnstableTrajectory(long t, double value)
        : Error("simulated output diverged at t=" + std::to_string(t) + " (|w|=" + std::to_string(value) + ")"),
          t_(t) {}
    long t() const noexcept { return t_; }

private:
    long t_;
};

/// The measurements at time t are inconsistent with the declared noise and
/// variation bounds: the feasible parameter set is empty.
class EmptyFps : public Error {
public:
    explicit EmptyFps(long t)
        : Error("feasible parameter set is empty at t=" + std::to_string(t)), t_(t) {}
    long t() const noexcept { return t_; }

private:
    long t_;
};

/// The LP solver broke down numerically (distinct from infeasibility).
class SolverFailure : public Error {
public:
    SolverFailure(long t, std::string what)
        : Error("LP solver failure at t=" + std::to_string(t) + ": " + what), t_(t) {}
    long t() const noexcept { return t_; }

private:
    long t_;
};

/// The brute-force oracle would need more subproblems than the configured cap.
class OracleBudgetExceeded : public Error {
public:
    OracleBudgetExceeded(double required, std::size_t cap)
        : Error("oracle needs " + std::to_string(static_cast<unsigned long long>(required)) +
                " subproblems, cap is " + std::to_string(cap)),
          required_(required) {}
    double required() const noexcept { return required_; }

private:
    double required_;
};

}  // namespace smid
