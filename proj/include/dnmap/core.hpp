#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnmap {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Base of every error the library raises. `name()` is the machine-readable
/// error class reported by the CLI.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* name() const noexcept { return "Error"; }
};

/// Malformed configuration (CLI exit 2).
class ConfigError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "ConfigError"; }
};

/// A hypothesis of the problem is violated (CLI exit 3).
class ValidationError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "ValidationError"; }
};

/// Everything below is a numerical failure (CLI exit 4).
class NumericalError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "NumericalError"; }
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "DomainError"; }
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "ConvergenceError"; }
};

class GeometryError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "GeometryError"; }
};

class RefinementError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "RefinementError"; }
};

class UnsupportedConfiguration : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "UnsupportedConfiguration"; }
};

class ModeError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "ModeError"; }
};

class StructuralError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "StructuralError"; }
};

/// i^m for any integer m, exact.
inline cplx ipow(int m) {
    switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

/// Angle reduced to [0, 2pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, 2.0 * pi);
    if (r < 0) r += 2.0 * pi;
    if (r >= 2.0 * pi) r -= 2.0 * pi;
    return r;
}

/// Shortest unsigned angular distance.
inline double angular_distance(double a, double b) {
    double d = wrap_angle(a - b);
    return d > pi ? 2.0 * pi - d : d;
}

inline cplx polar1(double ang) { return {std::cos(ang), std::sin(ang)}; }

} // namespace dnmap
