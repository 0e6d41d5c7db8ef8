#pragma once

// The weight |x|^p with n - 1 + p < 0: deficits of star-shaped sets around
// the origin, the ball-union counterexample whose boundary accumulates at the
// origin, its density there, and the divergence of P_p for sets whose reduced
// boundary passes through the origin.

#include <cstdint>
#include <span>
#include <string>

#include "wiso/measures.hpp"
#include "wiso/report.hpp"
#include "wiso/shapes.hpp"
#include "wiso/stability.hpp"

namespace wiso {

// ---------------------------------------------------------------------------
// Star-shaped deficits
// ---------------------------------------------------------------------------

struct NegpowerDeficit {
    StabilityReport stability;
    /// Radius with |B_rbar \ B_r| = |E \ B_r| (Euclidean).
    double rbar = 0.0;
    /// (n-1+p) int_{E} |x|^{p-1} - (n-1+p) int_{B_r} |x|^{p-1}, the
    /// divergence-theorem lower bound for the deficit.
    MeasureValue divergence_bound;
    /// (n-1+p) int_{B_rbar \ B_r} |x|^{p-1} = n omega_n (rbar^{n-1+p} - r^{n-1+p}).
    double shell_bound = 0.0;
    /// p < -n-1; otherwise p lies in [-n-1, 1-n) and only explored.
    bool in_stability_range = false;

    nlohmann::ordered_json to_json() const;
};

/// Deficit of E against B_r for W = |x|^p with Euclidean volume and symmetric
/// difference. Requires p < 1 - n (ArgumentError), the origin inside E, i.e.
/// 1 + u > 0 on the grid (DomainError), and |E| = |B_r| within volume_tol
/// (VolumeMismatch).
NegpowerDeficit negpower_deficit(double p, const NearlySphericalSet& E, const MeasureGrid& grid,
                                 double volume_tol = 1e-10);

struct NegpowerSweepOptions {
    int seeds = 100;
    std::uint64_t seed = 1;
    int max_degree = 4;
    /// Amplitude in units of the direction's W^{1,inf} norm.
    double amplitude = 1e-2;
    int resolution = 0;
    double scaling_tol = 0.1;
};

/// Volume-matched random perturbations of B_r at amplitudes a and a/2:
/// deficit >= 0, deficit >= divergence bound >= shell bound, and
/// deficit(a/2) / deficit(a) within scaling_tol of 1/4.
ExperimentReport negpower_sweep(double p, double r, int n, const NegpowerSweepOptions& opt);

// ---------------------------------------------------------------------------
// Counterexample
// ---------------------------------------------------------------------------

/// Closed-form bounds for the union of B_{r_i}(q_i), r_i = r 2^{-i/n}:
///   U = sum_{i<N} n omega_n r_i^{beta}, beta = n-1+p/alpha, tail = the rest of the series,
///   L = 2^{(n-1+p)/n} n omega_n r^{n-1+p} <= P_p(B_E).
struct CounterexampleBounds {
    double r = 0.0;
    double upper = 0.0;
    double tail = 0.0;
    double lower = 0.0;
    /// sum_{i<N} omega_n r_i^n and the full series 2 omega_n r^n.
    double volume_partial = 0.0;
    double volume_bound = 0.0;
    /// upper + tail < lower: the isoperimetric inequality fails for the union.
    bool inequality_fails = false;
    /// r < 2^{-alpha}, so the union can be built.
    bool constructible = false;
};

/// Throws ArgumentError unless p < 1 - n, alpha > max(1, -p/(n-1)), r > 0, N >= 1.
CounterexampleBounds counterexample_bounds(int n, double p, double alpha, double r, int N);

/// The r below which upper + tail < lower (the full series is proportional to r^beta).
double counterexample_threshold(int n, double p, double alpha);

/// Bounds for every r in `rs`, log-log slopes of U and L against r, the
/// threshold, and for constructible r a seeded union with a sampled check that
/// its boundary stays at |x| >= r_i^{1/alpha}.
ExperimentReport counterexample_demo(int n, double p, double alpha, std::span<const double> rs, int N,
                                     std::uint64_t seed, double slope_tol = 0.01);

/// Stratified Monte Carlo estimate of |E cap B_rho| / (omega_n rho^n) for the
/// stored balls, with a normal-approximation half-width (floored at 3/m for a
/// zero count), against 2 rho^{n(alpha-1)}. Throws AccuracyError when
/// mc_samples < 1000 and ArgumentError for rho <= 0.
ExperimentReport origin_density_curve(const BallUnion& U, std::span<const double> rhos, std::size_t mc_samples,
                                      std::uint64_t seed, int strata = 16);

// ---------------------------------------------------------------------------
// Divergence at the origin
// ---------------------------------------------------------------------------

enum class ProbeShape { Hyperplane, TangentSphere };
ProbeShape probe_shape_from_string(const std::string& s);
std::string to_string(ProbeShape s);

/// int |x|^p over the part of the boundary in B_outer \ B_delta, for a
/// hyperplane through 0 or the sphere of radius R centred at R e_1.
MeasureValue truncated_perimeter(int n, double p, ProbeShape shape, double delta, double outer, double R = 1.0);

/// Truncated perimeters for the deltas; for p < 1 - n the fitted log-log
/// slope must equal n-1+p within slope_tol relative. For p = 1 - n the
/// divergence is logarithmic: the power slope is reported and the verdict asks
/// the fitted coefficient of -log(delta) to match (n-1) omega_{n-1}.
ExperimentReport divergence_probe(int n, double p, ProbeShape shape, std::span<const double> deltas,
                                  double outer = 0.5, double R = 1.0, double slope_tol = 0.02);

}  // namespace wiso
