#pragma once

// Stability experiments for log-convex densities: Taylor coefficients of the
// volume constraint, ball identities from the divergence theorem, deficit
// ratios for nearly spherical sets, translated balls and ellipsoids, and the
// second-order expansion along the translated-ball family.

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "wiso/measures.hpp"
#include "wiso/report.hpp"
#include "wiso/shapes.hpp"
#include "wiso/weights.hpp"

namespace wiso {

// ---------------------------------------------------------------------------
// Closed-form identities
// ---------------------------------------------------------------------------

/// a = int_0^1 t^{n-1} e^{w(rt)}, b = int_0^1 t^n w'(rt) e^{w(rt)},
/// c = int_0^1 t^{n+1} w''(rt) e^{w(rt)}, d = int_0^1 t^{n+1} w'(rt)^2 e^{w(rt)}.
struct TaylorCoefficients {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    /// Largest quadrature error estimate among the four integrals.
    double quadrature_error = 0.0;
    /// r b = e^{w(r)} - n a, relative to the largest term.
    double residual_first = 0.0;
    /// r^2 (c + d) = r w'(r) e^{w(r)} - (n+1)(e^{w(r)} - n a), relative to the
    /// largest term.
    double residual_second = 0.0;
};

/// Throws ArgumentError unless r > 0 and n >= 2.
TaylorCoefficients taylor_coefficients(const ConvexProfile& w, double r, int n);

/// The two ball identities at radius r:
///   (n-1) int_{B_r} e^w w'/|x| = w'(r) P_w(B_r) - int_{B_r} e^w (w'^2 + w''),
///   int_{B_r} e^w |x| w' = r P_w(B_r) - n |B_r|_w.
/// Residuals are relative to the largest term of each identity.
struct DivergenceIdentities {
    double lhs_first = 0.0, rhs_first = 0.0, residual_first = 0.0;
    double lhs_second = 0.0, rhs_second = 0.0, residual_second = 0.0;
    double quadrature_error = 0.0;
};
DivergenceIdentities divergence_identities(const ConvexProfile& w, double r, int n);

/// rho''(0) for the translated balls of fixed weighted volume, from
///   -(r/n) int_{B_r} e^w (w'^2 + w'' + (n-1) w'/|x|) / (n |B_r|_w + int_{B_r} e^w |x| w')
/// evaluated by radial quadrature.
MeasureValue rho_second_derivative(const ConvexProfile& w, double r, int n);

/// Second derivative at eps = 0 of P_w(B_{rho(eps)}(eps e_1)):
///   P_w(B_r) [rho''(0) ((n-1)/r + w'(r)) + (w'^2 + w'' + (n-1) w'/r)(r) / n].
MeasureValue perimeter_second_derivative(const ConvexProfile& w, double r, int n);

// ---------------------------------------------------------------------------
// Perturbations
// ---------------------------------------------------------------------------

/// Seeded coefficients in [-1, 1] damped by (1 + k)^{-2}, degrees
/// min_degree..max_degree; lower degrees are zero.
HarmonicCoefficients random_direction(int n, int max_degree, std::uint64_t seed, int min_degree = 1);

/// Sampled sup |u| + sup |grad u| on the grid's fine rule.
double w1inf_norm(const HarmonicCoefficients& u, const MeasureGrid& grid);

struct MatchedSet {
    NearlySphericalSet set;
    double c0 = 0.0;
    double relative_residual = 0.0;
    int iterations = 0;
};

/// u = amplitude * direction + c0 Y_{0,1}, with c0 found by secant iteration
/// so that |E|_w = |B_r|_w to 1e-12 relative (Euclidean volume when
/// `euclidean`). Throws DegenerateShape when sup |u| >= 1/2 and SolverError
/// when the iteration does not converge.
MatchedSet volume_matched_perturbation(const RadialWeight& W, double r, const HarmonicCoefficients& direction,
                                       double amplitude, const MeasureGrid& grid, bool euclidean = false);

// ---------------------------------------------------------------------------
// Deficit reports
// ---------------------------------------------------------------------------

struct StabilityReport {
    MeasureValue deficit;
    double grad_sq = 0.0;
    double l2_sq = 0.0;
    MeasureValue symdiff;
    /// deficit / (r^{n-1} W(r) grad_sq); NaN when grad_sq == 0.
    double ratio_fuglede = 0.0;
    /// deficit / symdiff^2 with its propagated error; NaN when symdiff == 0.
    double ratio_quant = 0.0;
    double ratio_quant_error = 0.0;
    /// True when the set is the reference ball and no ratio is defined.
    bool degenerate = false;
    double volume_mismatch = 0.0;
    bool volume_matched = false;
    double w1inf = 0.0;

    nlohmann::ordered_json to_json() const;
};

/// Requires |E|_w = |B_r|_w within `volume_tol` relative, else VolumeMismatch.
/// Without `with_symdiff` the symmetric difference and ratio_quant are NaN.
StabilityReport fuglede_report(const RadialWeight& W, const NearlySphericalSet& E, const MeasureGrid& grid,
                               double volume_tol = 1e-10, bool with_symdiff = true);

StabilityReport quantitative_ratio(const RadialWeight& W, const NearlySphericalSet& E, const MeasureGrid& grid,
                                   double volume_tol = 1e-10);
/// Translated ball against B_r; volume tolerance as above.
StabilityReport quantitative_ratio(const RadialWeight& W, double r, const OffCenterBall& B,
                                   double volume_tol = 1e-10);

struct FugledeSweepOptions {
    int seeds = 50;
    std::uint64_t seed = 1;
    int max_degree = 4;
    int min_degree = 1;
    /// Amplitude in units of the direction's W^{1,inf} norm.
    double amplitude = 9e-3;
    int resolution = 0;
    double w1inf_bound = 1e-2;
    double ratio_floor = 1e-2;
    /// Allowed relative deviation of deficit(a/2) / deficit(a) from 1/4.
    double scaling_tol = 0.1;
    /// Also compute ratio_quant at amplitude a (costly in n = 3).
    bool quantitative = true;
};

/// Volume-matched random perturbations (seeds seed, seed+1, ...) at
/// amplitude a and a/2: deficit sign, Fuglede ratio floor and quadratic
/// scaling verdicts. Power weights use Euclidean volume.
ExperimentReport fuglede_sweep(const RadialWeight& W, double r, int n, const FugledeSweepOptions& opt);

/// Deficit, symmetric difference and ratio along B_{rho(eps)}(eps e_1) for
/// the given eps values (decreasing). When w''(r) = 0 the verdict asks for a
/// monotone decay of the ratio by at least `decay` from first to last eps;
/// otherwise for a ratio bounded away from zero (last >= first / decay).
ExperimentReport translated_ball_scan(const ConvexProfile& w, double r, int n, std::span<const double> eps,
                                      double decay = 10.0);

/// Finite-difference check of rho'(0), rho''(0) and the second derivative of
/// the translated-ball perimeter against the closed forms, steps h and h/2
/// with Richardson extrapolation. `expansion_check` runs for any w; the
/// degenerate variant requires |w''(r)| < 1e-12 (PreconditionError).
ExperimentReport expansion_check(const ConvexProfile& w, double r, int n, double h = 1e-3);
ExperimentReport degenerate_expansion_check(const ConvexProfile& w, double r, int n, double h = 1e-3);

/// Ellipsoids with axes (r s, r s^{-1/(n-1)}, ...), s = 1 + t, uniformly
/// rescaled to |E|_w = |B_r|_w. Verdicts: the ratio deficit / symdiff^2
/// stays in a band max/min <= `band`, and halving t scales the deficit by a
/// factor in [0.2, 0.3].
ExperimentReport ellipsoid_sharpness_scan(const RadialWeight& W, double r, int n, std::span<const double> ts,
                                          int resolution, double band = 2.0);

}  // namespace wiso
