#pragma once

// Shared vocabulary for the weighted-isoperimetry lab: error types, sphere
// constants and the small value types every module passes around.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wiso {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base of every error thrown by the library. `kind()` is a stable tag used
/// in structured CLI reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& w) : Error("argument", w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct UnsupportedDimension : Error {
    explicit UnsupportedDimension(const std::string& w) : Error("unsupported-dimension", w) {}
};
struct IntegrandError : Error {
    explicit IntegrandError(const std::string& w) : Error("integrand", w) {}
};
struct AccuracyError : Error {
    explicit AccuracyError(const std::string& w) : Error("accuracy", w) {}
};
struct SolverError : Error {
    explicit SolverError(const std::string& w) : Error("solver", w) {}
};
struct DegenerateShape : Error {
    explicit DegenerateShape(const std::string& w) : Error("degenerate-shape", w) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& w) : Error("precondition", w) {}
};
struct PoolExhausted : Error {
    explicit PoolExhausted(const std::string& w) : Error("pool-size", w) {}
};
struct VolumeMismatch : Error {
    explicit VolumeMismatch(const std::string& w) : Error("volume-mismatch", w) {}
};
struct UnsupportedGeometry : Error {
    explicit UnsupportedGeometry(const std::string& w) : Error("unsupported-geometry", w) {}
};

// ---------------------------------------------------------------------------
// Geometry constants
// ---------------------------------------------------------------------------

/// Lebesgue measure of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// H^{n-1} measure of the unit sphere S^{n-1}, i.e. n times the ball volume.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

/// Points in R^n for n <= 3; unused trailing components are zero.
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// A computed quantity together with a non-negative estimate of its
/// quadrature error.
struct MeasureValue {
    double value = 0.0;
    double error = 0.0;
};

inline MeasureValue operator-(const MeasureValue& a, const MeasureValue& b) {
    return {a.value - b.value, a.error + b.error};
}

}  // namespace wiso
