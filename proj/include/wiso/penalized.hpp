#pragma once

// Penalized perimeter functionals
//   J(E) = P_w(E) + L1 | |E|_w - |B_r|_w | + L2 | |E symdiff B_r|_w - alpha |
// on nearly spherical sets, their closed-form thresholds, the reduction to
// centered balls, and gradient descent in harmonic coefficient space.

#include <cstdint>
#include <string>

#include "wiso/measures.hpp"
#include "wiso/report.hpp"
#include "wiso/weights.hpp"

namespace wiso {

struct Thresholds {
    double lambda1_min = 0.0;  // n - 1 + r w'(r)
    double lambda2_min = 0.0;  // 2 (4(n+1)/r + w'(2r))
};

/// Throws ArgumentError unless r > 0 and n >= 2.
Thresholds thresholds(const ConvexProfile& w, double r, int n);

struct PenalizedFunctional {
    ConvexProfile w;
    double r = 1.0;
    int n = 2;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha = 0.0;

    /// Requires r > 0, n >= 2 and non-negative lambda1, lambda2, alpha.
    PenalizedFunctional(ConvexProfile w, double r, int n, double lambda1, double lambda2, double alpha = 0.0);
    /// Both lambdas at their thresholds (times `factor`).
    static PenalizedFunctional at_thresholds(ConvexProfile w, double r, int n, double factor = 1.0,
                                             double alpha = 0.0);

    RadialWeight weight() const { return RadialWeight::exp_convex(w); }
    Thresholds thresholds() const { return wiso::thresholds(w, r, n); }
    bool lambda1_ok() const { return lambda1 >= thresholds().lambda1_min; }
    bool lambda2_ok() const { return lambda2 >= thresholds().lambda2_min; }
};

struct JValue {
    MeasureValue total;
    MeasureValue perimeter;
    /// |E|_w - |B_r|_w.
    MeasureValue volume_gap;
    MeasureValue symdiff;
};

/// Unsmoothed functional, symmetric difference by adaptive quadrature.
JValue evaluate_j(const PenalizedFunctional& F, const NearlySphericalSet& E, const MeasureGrid& grid);

/// Node-sum functional with |x| ~ sqrt(x^2 + delta^2) - delta in both
/// penalties (and inside the symmetric difference); zero offset at the ball.
double evaluate_j_smoothed(const PenalizedFunctional& F, const NearlySphericalSet& E, const MeasureGrid& grid,
                           double delta);

/// J on the centered ball B_rho:
///   n omega_n rho^{n-1} e^{w(rho)} + L1 |D| + L2 ||D| - alpha|,  D = Phi(rho) - Phi(r).
double radial_reduction(const PenalizedFunctional& F, double rho);

struct DescentOptions {
    int max_degree = 8;
    int steps = 400;
    /// Initial trial step of the backtracking line search.
    double step_size = 1.0;
    /// Stop when the gradient norm drops below this value.
    double grad_tol = 1e-9;
    /// Stop when the objective has not decreased for this many steps.
    int patience = 25;
    double delta = 1e-8;
    /// Run even when a lambda is below its threshold.
    bool allow_below_threshold = false;
    int resolution = 0;
};

/// Stored in report tables as 0..3. A run that reaches the kink of the
/// penalties at the ball typically ends Stalled, not Converged.
enum class DescentStatus { Converged = 0, StepLimit = 1, Stalled = 2, Degenerate = 3 };
std::string to_string(DescentStatus s);

struct DescentResult {
    HarmonicCoefficients u;
    /// Columns step, objective, grad_norm, sup_u.
    Table trace;
    DescentStatus status = DescentStatus::StepLimit;
    std::string message;
    /// Unsmoothed J at the final coefficients.
    JValue final_j;
    double final_sup_u = 0.0;
};

/// Gradient descent with Armijo backtracking on the smoothed functional,
/// central-difference gradients. The trace records accepted steps only, so it
/// is strictly decreasing. Throws PreconditionError below the thresholds
/// unless allowed.
DescentResult minimize_j(const PenalizedFunctional& F, const HarmonicCoefficients& init, const DescentOptions& opt);

/// Seeded coefficients (degrees 0..K) rescaled to sup |u| = target on the grid.
HarmonicCoefficients random_perturbation(int n, int max_degree, std::uint64_t seed, double sup_target,
                                         const MeasureGrid& grid);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// J(B_rho) on rho in [r/2, 2r] (`points` samples, r included); verdict that
/// the grid minimum is at rho = r.
ExperimentReport radial_scan(const PenalizedFunctional& F, int points = 301);

/// Sampled sets with sup |u| in (0, sup_max]: J(E) >= J(B_r) for each, plus
/// one-sided difference quotients of J at the ball along +-e_k (step h) >= -tol.
ExperimentReport ball_minimality_check(const PenalizedFunctional& F, int samples, std::uint64_t seed,
                                       int max_degree = 4, double sup_max = 0.2, int resolution = 0,
                                       double h = 1e-5, double tol = 1e-6);

struct PenalizedRunOptions {
    DescentOptions descent;
    int seeds = 10;
    std::uint64_t seed = 1;
    double init_sup = 0.05;
    double final_sup = 1e-3;
    /// Also run the lambda1 = lambda2 = 0 control.
    bool control = true;
    int control_steps = 30;
};

/// Descent from `seeds` random starts: final sup |u| < final_sup for every
/// seed. The control run (no penalties) must drive the objective below
/// P_w(B_r).
ExperimentReport penalized_descent(const PenalizedFunctional& F, const PenalizedRunOptions& opt);

}  // namespace wiso
