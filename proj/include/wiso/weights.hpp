#pragma once

// Radial densities W(|x|): either exp(w(t)) with w even and convex, or a
// pure power t^p. Profiles carry closed-form derivatives; finite differences
// only ever serve as a cross-check.

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wiso/report.hpp"

namespace wiso {

enum class Smoothness { C2, C3 };

/// An even convex function w on R bundled with w', w'' and w'''.
struct ConvexProfile {
    std::string name;
    std::vector<double> params;
    std::function<double(double)> w;
    std::function<double(double)> dw;
    std::function<double(double)> d2w;
    std::function<double(double)> d3w;
    Smoothness smoothness = Smoothness::C3;
    /// Radii t > 0 where w fails to be analytic; quadratures split there.
    std::vector<double> breakpoints;
};

/// w == 0.
ConvexProfile zero_profile();
/// w(t) = t^2.
ConvexProfile square_profile();
/// w(t) = cosh(t) - 1.
ConvexProfile cosh_profile();
/// w(t) = max(|t| - r0, 0)^4: flat on [-r0, r0], C^3 with w''(r0) = 0.
ConvexProfile make_flat_shoulder_profile(double r0);

/// Looks up a built-in profile: "zero", "square", "cosh", "flat-shoulder"
/// (params = {r0}). Throws ArgumentError for unknown names.
ConvexProfile make_profile(const std::string& name, const std::vector<double>& params = {});

class RadialWeight {
public:
    static RadialWeight exp_convex(ConvexProfile profile);
    static RadialWeight power(double exponent);

    bool is_power() const { return std::holds_alternative<double>(kind_); }
    /// Null for power weights.
    const ConvexProfile* profile() const { return std::get_if<ConvexProfile>(&kind_); }
    /// Throws ArgumentError for exp-convex weights.
    double exponent() const;

    /// W(t). Power kind requires t > 0.
    double value(double t) const;
    /// W'(t).
    double derivative(double t) const;
    /// W'(t) / W(t), i.e. w'(t) or p/t.
    double log_derivative(double t) const;

    std::string describe() const;
    /// Non-analytic radii of the profile (empty for powers).
    const std::vector<double>& breakpoints() const;

private:
    explicit RadialWeight(std::variant<ConvexProfile, double> k) : kind_(std::move(k)) {}
    std::variant<ConvexProfile, double> kind_;
};

/// e^{w(t)} or t^p. Throws DomainError for t <= 0 with a power weight and
/// for t < 0 in general.
double eval_weight(const RadialWeight& weight, double t);

/// Tolerances used by the hypothesis audit.
struct AdmissibilityTolerances {
    double convex = 1e-12;   // absolute, on min w''
    double evenness = 1e-12; // relative to max(1, |w|)
    double fd = 1e-5;        // relative to max(1, |exact|)
    double fd_step = 1e-4;
};

/// `points` equispaced samples of [-half_width, half_width].
std::vector<double> symmetric_grid(double half_width, int points);

/// Audits evenness, convexity and derivative consistency on a grid that is
/// symmetric about 0 with at least 100 points.
ExperimentReport check_admissible(const ConvexProfile& w, std::span<const double> grid,
                                  const AdmissibilityTolerances& tol = {});

}  // namespace wiso
