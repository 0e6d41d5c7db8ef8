#include "wiso/penalized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wiso/stability.hpp"

namespace wiso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double smooth_abs(double x, double delta) { return std::sqrt(x * x + delta * delta) - delta; }

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void require_match(const PenalizedFunctional& F, const NearlySphericalSet& E) {
    if (E.n != F.n) throw ArgumentError("set dimension does not match the functional");
    if (E.r != F.r) throw ArgumentError("set reference radius does not match the functional");
}

// Copies coefficients into a set of degree max_degree; higher degrees must vanish.
HarmonicCoefficients resize(const HarmonicCoefficients& c, int max_degree) {
    auto out = HarmonicCoefficients::zeros(c.n, max_degree);
    for (int k = 0; k <= c.max_degree; ++k)
        for (int i = 1; i <= harmonic_multiplicity(c.n, k); ++i) {
            if (k <= max_degree)
                out.at(k, i) = c.at(k, i);
            else if (c.at(k, i) != 0.0)
                throw ArgumentError("initial coefficients exceed the descent degree");
        }
    return out;
}

double sup_u(const HarmonicCoefficients& u, const MeasureGrid& grid) {
    return sample_w1inf(NearlySphericalSet{u.n, 1.0, u}, grid.table()).sup_u;
}

}  // namespace

Thresholds thresholds(const ConvexProfile& w, double r, int n) {
    if (!(r > 0.0)) throw ArgumentError("thresholds need r > 0");
    if (n < 2) throw ArgumentError("thresholds need n >= 2");
    return {n - 1 + r * w.dw(r), 2.0 * (4.0 * (n + 1) / r + w.dw(2.0 * r))};
}

PenalizedFunctional::PenalizedFunctional(ConvexProfile w_, double r_, int n_, double l1, double l2, double a)
    : w(std::move(w_)), r(r_), n(n_), lambda1(l1), lambda2(l2), alpha(a) {
    if (!(r > 0.0)) throw ArgumentError("penalized functional needs r > 0");
    if (n < 2) throw ArgumentError("penalized functional needs n >= 2");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(alpha >= 0.0))
        throw ArgumentError("lambda1, lambda2 and alpha must be non-negative");
}

PenalizedFunctional PenalizedFunctional::at_thresholds(ConvexProfile w, double r, int n, double factor,
                                                       double alpha) {
    const auto t = wiso::thresholds(w, r, n);
    return PenalizedFunctional(std::move(w), r, n, factor * t.lambda1_min, factor * t.lambda2_min, alpha);
}

JValue evaluate_j(const PenalizedFunctional& F, const NearlySphericalSet& E, const MeasureGrid& grid) {
    require_match(F, E);
    const RadialWeight W = F.weight();
    JValue j;
    j.perimeter = perimeter_nearly_spherical(W, E, grid);
    const auto vol = volume_nearly_spherical(W, E, grid);
    j.volume_gap = {vol.value - ball_volume(W, F.r, F.n).value, vol.error};
    j.symdiff = symdiff_measure(W, E, F.r, grid.resolution());
    const double pen2 = std::abs(j.symdiff.value - F.alpha);
    j.total = {j.perimeter.value + F.lambda1 * std::abs(j.volume_gap.value) + F.lambda2 * pen2,
               j.perimeter.error + F.lambda1 * j.volume_gap.error + F.lambda2 * j.symdiff.error};
    return j;
}

double evaluate_j_smoothed(const PenalizedFunctional& F, const NearlySphericalSet& E, const MeasureGrid& grid,
                           double delta) {
    require_match(F, E);
    const RadialWeight W = F.weight();
    const double P = perimeter_nearly_spherical(W, E, grid, false).value;
    const double gap = volume_nearly_spherical(W, E, grid, false, false).value - ball_volume(W, F.r, F.n).value;
    const double sd = symdiff_smoothed(W, E, grid, false, delta);
    return P + F.lambda1 * smooth_abs(gap, delta) + F.lambda2 * smooth_abs(sd - F.alpha, delta);
}

double radial_reduction(const PenalizedFunctional& F, double rho) {
    if (!(rho > 0.0)) throw ArgumentError("radial reduction needs rho > 0");
    const RadialWeight W = F.weight();
    const double s = unit_sphere_area(F.n);
    const double D = s * layer_mass(W, F.n, F.r, rho, false, 48);
    return s * std::pow(rho, F.n - 1) * W.value(rho) + F.lambda1 * std::abs(D) +
           F.lambda2 * std::abs(std::abs(D) - F.alpha);
}

std::string to_string(DescentStatus s) {
    switch (s) {
        case DescentStatus::Converged: return "converged";
        case DescentStatus::StepLimit: return "step-limit";
        case DescentStatus::Stalled: return "stalled";
        case DescentStatus::Degenerate: return "degenerate";
    }
    return "unknown";
}

DescentResult minimize_j(const PenalizedFunctional& F, const HarmonicCoefficients& init, const DescentOptions& opt) {
    if (init.n != F.n) throw ArgumentError("initial coefficients have the wrong dimension");
    if (opt.max_degree < 0 || opt.steps < 0 || opt.patience < 1 || !(opt.step_size > 0.0) || !(opt.delta > 0.0))
        throw ArgumentError("invalid descent options");
    if (!opt.allow_below_threshold && !(F.lambda1_ok() && F.lambda2_ok())) {
        const auto t = F.thresholds();
        throw PreconditionError("lambdas below thresholds (lambda1 >= " + format_short(t.lambda1_min) +
                                ", lambda2 >= " + format_short(t.lambda2_min) + ")");
    }
    const MeasureGrid grid(F.n, opt.resolution > 0 ? opt.resolution : default_resolution(F.n), opt.max_degree);
    NearlySphericalSet E{F.n, F.r, resize(init, opt.max_degree)};
    auto J = [&](const std::vector<double>& x) {
        E.u.values = x;
        try {
            return evaluate_j_smoothed(F, E, grid, opt.delta);
        } catch (const DegenerateShape&) {
            return kInf;
        } catch (const IntegrandError&) {
            return kInf;  // trial step overflowed the weight
        }
    };

    DescentResult res;
    res.trace = Table{"trace", {"step", "objective", "grad_norm", "sup_u"}, {}};
    std::vector<double> x = E.u.values, g(x.size()), trial(x.size());
    double f = J(x);
    if (!std::isfinite(f)) throw DegenerateShape("initial set is not a valid radial graph");
    double t = opt.step_size;
    std::vector<double> history{f};
    int step = 0;
    for (;; ++step) {
        const double h = std::clamp(1e-4 * max_abs(x), 1e-10, 1e-6);
        bool degenerate = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            trial = x;
            trial[i] = x[i] + h;
            const double fp = J(trial);
            trial[i] = x[i] - h;
            const double fm = J(trial);
            degenerate = degenerate || !std::isfinite(fp) || !std::isfinite(fm);
            g[i] = (fp - fm) / (2.0 * h);
        }
        const double gn = norm2(g);
        E.u.values = x;
        res.trace.add_row({static_cast<double>(step), f, gn, sup_u(E.u, grid)});
        if (degenerate) {
            res.status = DescentStatus::Degenerate;
            res.message = "gradient stencil left the admissible sets";
            break;
        }
        if (gn <= opt.grad_tol) {
            res.status = DescentStatus::Converged;
            res.message = "gradient norm " + format_short(gn) + " below tolerance";
            break;
        }
        if (step == opt.steps) {
            res.status = DescentStatus::StepLimit;
            res.message = "step limit reached";
            break;
        }
        // Armijo backtracking, starting from twice the last accepted step.
        t = std::min(opt.step_size, 2.0 * t);
        double ft = kInf;
        for (int k = 0; k < 80; ++k, t *= 0.5) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - t * g[i];
            ft = J(trial);
            if (ft <= f - 1e-4 * t * gn * gn) break;
        }
        if (!(ft < f)) {
            res.status = DescentStatus::Stalled;
            res.message = "line search found no decrease at step " + std::to_string(step);
            break;
        }
        x = trial;
        f = ft;
        history.push_back(f);
        const std::size_t m = history.size();
        if (m > static_cast<std::size_t>(opt.patience)) {
            const double before = history[m - 1 - static_cast<std::size_t>(opt.patience)];
            if (before - f <= 1e-15 * std::abs(before)) {
                res.status = DescentStatus::Stalled;
                res.message = "no decrease over " + std::to_string(opt.patience) + " steps";
                ++step;
                E.u.values = x;
                res.trace.add_row({static_cast<double>(step), f, kInf, sup_u(E.u, grid)});
                break;
            }
        }
    }
    E.u.values = x;
    res.u = E.u;
    res.final_sup_u = sup_u(E.u, grid);
    res.final_j = evaluate_j(F, E, grid);
    return res;
}

HarmonicCoefficients random_perturbation(int n, int max_degree, std::uint64_t seed, double sup_target,
                                         const MeasureGrid& grid) {
    if (!(sup_target > 0.0)) throw ArgumentError("perturbation size must be positive");
    auto u = random_direction(n, max_degree, seed, 0);
    const double s = sup_u(u, grid);
    if (s == 0.0) throw ArgumentError("random perturbation vanished");
    u *= sup_target / s;
    return u;
}

// ---------------------------------------------------------------------------

ExperimentReport radial_scan(const PenalizedFunctional& F, int points) {
    if (points < 3) throw ArgumentError("radial scan needs at least three points");
    ExperimentReport rep("radial-scan");
    auto& tab = rep.add_table("profile", {"rho", "j"});
    const double lo = 0.5 * F.r, hi = 2.0 * F.r;
    const double at_r = radial_reduction(F, F.r);
    double best = kInf, best_rho = 0.0;
    for (int i = 0; i < points; ++i) {
        // Geometric spacing puts rho = r exactly at the midpoint for odd counts.
        const double rho = i == (points - 1) / 2 && points % 2 == 1
                               ? F.r
                               : lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        const double v = radial_reduction(F, rho);
        tab.add_row({rho, v});
        if (v < best) {
            best = v;
            best_rho = rho;
        }
    }
    rep.add_scalar("j_at_r", at_r);
    rep.add_scalar("j_min", best);
    rep.add_scalar("argmin_rho", best_rho);
    const auto t = F.thresholds();
    rep.add_scalar("lambda1_min", t.lambda1_min);
    rep.add_scalar("lambda2_min", t.lambda2_min);
    rep.add_verdict("ball_minimizes_radial", best >= at_r, "J(B_rho) >= J(B_r) for rho in [r/2, 2r]");
    return rep;
}

ExperimentReport ball_minimality_check(const PenalizedFunctional& F, int samples, std::uint64_t seed,
                                       int max_degree, double sup_max, int resolution, double h, double tol) {
    if (samples < 1) throw ArgumentError("minimality check needs at least one sample");
    if (!(sup_max > 0.0) || sup_max >= 0.5) throw ArgumentError("sup_max must lie in (0, 1/2)");
    const MeasureGrid grid(F.n, resolution > 0 ? resolution : default_resolution(F.n), max_degree);
    ExperimentReport rep("ball-minimality");
    const auto t = F.thresholds();
    rep.add_scalar("lambda1_min", t.lambda1_min);
    rep.add_scalar("lambda2_min", t.lambda2_min);
    rep.add_scalar("lambda1", F.lambda1);
    rep.add_scalar("lambda2", F.lambda2);
    rep.add_verdict("lambda1_threshold", F.lambda1_ok(), "lambda1 >= n - 1 + r w'(r)");
    rep.add_verdict("lambda2_threshold", F.lambda2_ok(), "lambda2 >= 2 (4(n+1)/r + w'(2r))");

    const auto ball = NearlySphericalSet{F.n, F.r, HarmonicCoefficients::zeros(F.n, max_degree)};
    const auto j0 = evaluate_j(F, ball, grid);
    rep.add_scalar("j_ball", j0.total.value, j0.total.error);

    auto& tab = rep.add_table("samples", {"seed", "sup_u", "j", "j_error", "excess"});
    bool all = true;
    double min_excess = kInf;
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        const double target = sup_max * (i + 1) / samples;
        const NearlySphericalSet E{F.n, F.r, random_perturbation(F.n, max_degree, s, target, grid)};
        const auto j = evaluate_j(F, E, grid);
        const double excess = j.total.value - j0.total.value;
        all = all && excess >= -(j.total.error + j0.total.error);
        min_excess = std::min(min_excess, excess);
        tab.add_row({static_cast<double>(s), target, j.total.value, j.total.error, excess});
    }
    rep.add_scalar("min_excess", min_excess);
    rep.add_verdict("ball_minimizes_samples", all, "J(E) >= J(B_r) up to quadrature error for every sample");

    auto& dir = rep.add_table("directional", {"index", "sign", "quotient"});
    double min_q = kInf;
    for (std::size_t k = 0; k < ball.u.size(); ++k) {
        for (double sgn : {1.0, -1.0}) {
            NearlySphericalSet E = ball;
            E.u.values[k] = sgn * h;
            const double q = (evaluate_j(F, E, grid).total.value - j0.total.value) / h;
            min_q = std::min(min_q, q);
            dir.add_row({static_cast<double>(k), sgn, q});
        }
    }
    rep.add_scalar("min_directional_quotient", min_q);
    rep.add_verdict("first_order_minimality", min_q >= -tol,
                    "(J(B_r + h e_k) - J(B_r)) / h >= -" + format_short(tol) + " along every +-e_k");
    return rep;
}

ExperimentReport penalized_descent(const PenalizedFunctional& F, const PenalizedRunOptions& opt) {
    if (opt.seeds < 1) throw ArgumentError("descent needs at least one seed");
    const auto& d = opt.descent;
    const MeasureGrid grid(F.n, d.resolution > 0 ? d.resolution : default_resolution(F.n), d.max_degree);
    const double P0 = ball_perimeter(F.weight(), F.r, F.n).value;
    ExperimentReport rep("penalized-descent");
    const auto t = F.thresholds();
    rep.add_scalar("lambda1_min", t.lambda1_min);
    rep.add_scalar("lambda2_min", t.lambda2_min);
    rep.add_scalar("lambda1", F.lambda1);
    rep.add_scalar("lambda2", F.lambda2);
    rep.add_scalar("ball_perimeter", P0);

    auto& runs = rep.add_table("runs", {"seed", "steps", "status", "objective", "objective_error",
                                        "relative_gap", "init_sup_u", "final_sup_u"});
    auto& trace = rep.add_table("trace", {"seed", "step", "objective", "grad_norm", "sup_u"});
    bool small = true;
    double worst_sup = 0.0, worst_gap = 0.0;
    for (int k = 0; k < opt.seeds; ++k) {
        const std::uint64_t s = opt.seed + static_cast<std::uint64_t>(k);
        const auto init = random_perturbation(F.n, d.max_degree, s, opt.init_sup, grid);
        const auto res = minimize_j(F, init, d);
        const double gap = (res.final_j.total.value - P0) / P0;
        small = small && res.final_sup_u < opt.final_sup;
        worst_sup = std::max(worst_sup, res.final_sup_u);
        worst_gap = std::max(worst_gap, std::abs(gap));
        runs.add_row({static_cast<double>(s), res.trace.rows.back()[0],
                      static_cast<double>(res.status), res.final_j.total.value,
                      res.final_j.total.error, gap, opt.init_sup, res.final_sup_u});
        for (const auto& row : res.trace.rows) trace.add_row({static_cast<double>(s), row[0], row[1], row[2], row[3]});
        if (res.status != DescentStatus::Converged)
            rep.add_note("seed " + std::to_string(s) + ": " + to_string(res.status) + " (" + res.message + ")");
    }
    rep.add_scalar("worst_final_sup_u", worst_sup);
    rep.add_scalar("worst_relative_gap", worst_gap);
    rep.add_verdict("descent_reaches_ball", small, "final sup |u| < " + format_short(opt.final_sup) + " for every seed");

    if (opt.control) {
        const PenalizedFunctional C(F.w, F.r, F.n, 0.0, 0.0, F.alpha);
        DescentOptions cd = d;
        cd.allow_below_threshold = true;
        cd.steps = opt.control_steps;
        const auto init = random_perturbation(F.n, d.max_degree, opt.seed, opt.init_sup, grid);
        const auto res = minimize_j(C, init, cd);
        rep.add_scalar("control_objective", res.final_j.total.value);
        rep.add_scalar("control_mean_shift", res.u.at(0, 1) - init.at(0, 1));
        rep.add_verdict("control_drifts", res.final_j.total.value < P0,
                        "without penalties the descent leaves B_r and lowers the objective below P_w(B_r)");
    }
    return rep;
}

}  // namespace wiso
