#include "wiso/negpower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wiso {

namespace {

struct Line {
    double slope = 0.0, intercept = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ArgumentError("slope fit needs at least two distinct abscissae");
    return {sxy / sxx, my - sxy / sxx * mx};
}

// int_S (R^g - r^g) over the rule, R = r (1 + u).
double shell_sum(const BasisTable& table, const HarmonicCoefficients& u, double r, double g) {
    const auto f = table.synthesize(u);
    std::vector<double> v(f.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(r, g) * std::expm1(g * std::log1p(f.values[i]));
    return integrate_sphere(table.rule(), v);
}

void require_counterexample_params(int n, double p, double alpha) {
    if (n < 2) throw ArgumentError("counterexample needs n >= 2");
    if (!(p < 1.0 - n)) throw ArgumentError("counterexample needs p < 1 - n");
    if (!(alpha > std::max(1.0, -p / (n - 1.0))))
        throw ArgumentError("alpha must exceed max(1, -p/(n-1)) = " + format_short(std::max(1.0, -p / (n - 1.0))));
}

// Deterministic directions on S^{n-1}: equispaced angles or a Fibonacci lattice.
std::vector<Vec3> probe_directions(int n, int count) {
    std::vector<Vec3> d;
    const double pi = std::numbers::pi;
    for (int k = 0; k < count; ++k) {
        if (n == 2) {
            const double a = 2.0 * pi * k / count;
            d.push_back({std::cos(a), std::sin(a), 0.0});
        } else {
            const double z = 1.0 - (2.0 * k + 1.0) / count;
            const double s = std::sqrt(1.0 - z * z), a = k * pi * (3.0 - std::sqrt(5.0));
            d.push_back({s * std::cos(a), s * std::sin(a), z});
        }
    }
    return d;
}

std::uint64_t stratum_seed(std::uint64_t seed, int k) {
    return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1));
}

}  // namespace

// ---------------------------------------------------------------------------

nlohmann::ordered_json NegpowerDeficit::to_json() const {
    auto j = stability.to_json();
    j["rbar"] = rbar;
    j["divergence_bound"] = divergence_bound.value;
    j["divergence_bound_error"] = divergence_bound.error;
    j["shell_bound"] = shell_bound;
    j["in_stability_range"] = in_stability_range;
    return j;
}

NegpowerDeficit negpower_deficit(double p, const NearlySphericalSet& E, const MeasureGrid& grid, double volume_tol) {
    const int n = E.n;
    if (!(p < 1.0 - n)) throw ArgumentError("negative-power deficit needs p < 1 - n");
    if (E.u.n != grid.dimension()) throw ArgumentError("set dimension does not match the grid");
    if (sample_w1inf(E, grid.table()).sup_u >= 1.0)
        throw DomainError("the origin is not an interior point of E (sup |u| >= 1)");
    const RadialWeight W = RadialWeight::power(p);

    NegpowerDeficit d;
    d.stability = fuglede_report(W, E, grid, volume_tol);
    d.in_stability_range = p < -n - 1.0;
    const double g = n - 1.0 + p;
    const double r = E.r;
    const double wn = unit_ball_volume(n);

    const double dv = volume_nearly_spherical(W, E, grid, true).value - wn * std::pow(r, n);
    const double outside = std::max(0.0, 0.5 * (d.stability.symdiff.value + dv));
    d.rbar = r * std::pow(1.0 + outside / (wn * std::pow(r, n)), 1.0 / n);
    d.shell_bound = n * wn * std::pow(r, g) * std::expm1(g * std::log(d.rbar / r));

    const double fine = shell_sum(grid.table(), E.u, r, g);
    const double coarse = shell_sum(grid.coarse_table(), E.u, r, g);
    d.divergence_bound = {fine, std::abs(fine - coarse)};
    return d;
}

ExperimentReport negpower_sweep(double p, double r, int n, const NegpowerSweepOptions& opt) {
    if (!(p < 1.0 - n)) throw ArgumentError("negative-power sweep needs p < 1 - n");
    if (!(r > 0.0)) throw ArgumentError("radius must be positive");
    if (opt.seeds < 1) throw ArgumentError("sweep needs at least one seed");
    const MeasureGrid grid(n, opt.resolution > 0 ? opt.resolution : default_resolution(n), opt.max_degree);
    const RadialWeight W = RadialWeight::power(p);
    ExperimentReport rep("negpower-deficit");
    auto& tab = rep.add_table("perturbations", {"seed", "amplitude", "deficit", "deficit_error", "symdiff",
                                                "ratio_quant", "divergence_bound", "shell_bound", "deficit_half",
                                                "halving_ratio"});
    bool nonneg = true, ordered = true, quadratic = true;
    double min_ratio = std::numeric_limits<double>::infinity(), worst = 0.0;
    for (int k = 0; k < opt.seeds; ++k) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(k);
        auto dir = random_direction(n, opt.max_degree, seed, 1);
        dir *= 1.0 / w1inf_norm(dir, grid);
        const auto full = volume_matched_perturbation(W, r, dir, opt.amplitude, grid, true);
        const auto half = volume_matched_perturbation(W, r, dir, 0.5 * opt.amplitude, grid, true);
        const auto d = negpower_deficit(p, full.set, grid);
        const auto dh = negpower_deficit(p, half.set, grid);
        const auto& s = d.stability;
        const double q = dh.stability.deficit.value / s.deficit.value;
        nonneg = nonneg && s.deficit.value >= -s.deficit.error && dh.stability.deficit.value >= -dh.stability.deficit.error;
        ordered = ordered && s.deficit.value >= d.divergence_bound.value - s.deficit.error - d.divergence_bound.error &&
                  d.divergence_bound.value >= d.shell_bound - d.divergence_bound.error;
        quadratic = quadratic && std::abs(4.0 * q - 1.0) <= opt.scaling_tol;
        min_ratio = std::min(min_ratio, s.ratio_quant);
        worst = std::max(worst, std::abs(4.0 * q - 1.0));
        tab.add_row({static_cast<double>(seed), opt.amplitude, s.deficit.value, s.deficit.error, s.symdiff.value,
                     s.ratio_quant, d.divergence_bound.value, d.shell_bound, dh.stability.deficit.value, q});
    }
    rep.add_scalar("min_ratio_quant", min_ratio);
    rep.add_scalar("worst_scaling_deviation", worst);
    if (!(p < -n - 1.0))
        rep.add_note("p = " + format_short(p) + " lies in [-n-1, 1-n): outside the proven range, explored only");
    rep.add_verdict("deficit_nonnegative", nonneg, "P_p(E) - P_p(B_r) >= -(its quadrature error) for every seed");
    rep.add_verdict("bounds_ordered", ordered, "deficit >= divergence bound >= shell bound");
    rep.add_verdict("quadratic_scaling", quadratic,
                    "deficit(a/2) / deficit(a) within " + format_short(opt.scaling_tol) + " relative of 1/4");
    return rep;
}

// ---------------------------------------------------------------------------

CounterexampleBounds counterexample_bounds(int n, double p, double alpha, double r, int N) {
    require_counterexample_params(n, p, alpha);
    if (!(r > 0.0)) throw ArgumentError("counterexample needs r > 0");
    if (N < 1) throw ArgumentError("counterexample needs N >= 1");
    const double wn = unit_ball_volume(n);
    const double beta = n - 1.0 + p / alpha, g = n - 1.0 + p;
    const double q = std::pow(2.0, -beta / n);
    const double qN = std::pow(q, N);
    CounterexampleBounds b;
    b.r = r;
    b.upper = n * wn * std::pow(r, beta) * (1.0 - qN) / (1.0 - q);
    b.tail = n * wn * std::pow(r, beta) * qN / (1.0 - q);
    b.lower = std::pow(2.0, g / n) * n * wn * std::pow(r, g);
    b.volume_partial = 2.0 * wn * std::pow(r, n) * (1.0 - std::pow(2.0, -N));
    b.volume_bound = 2.0 * wn * std::pow(r, n);
    b.inequality_fails = b.upper + b.tail < b.lower;
    b.constructible = r < std::pow(2.0, -alpha);
    return b;
}

double counterexample_threshold(int n, double p, double alpha) {
    require_counterexample_params(n, p, alpha);
    const double beta = n - 1.0 + p / alpha, g = n - 1.0 + p;
    const double q = std::pow(2.0, -beta / n);
    return std::pow(std::pow(2.0, g / n) * (1.0 - q), 1.0 / (beta - g));
}

ExperimentReport counterexample_demo(int n, double p, double alpha, std::span<const double> rs, int N,
                                     std::uint64_t seed, double slope_tol) {
    require_counterexample_params(n, p, alpha);
    if (rs.size() < 2) throw ArgumentError("counterexample scan needs at least two radii");
    std::vector<double> radii(rs.begin(), rs.end());
    std::sort(radii.begin(), radii.end(), std::greater<>());
    const double beta = n - 1.0 + p / alpha, g = n - 1.0 + p;
    const double threshold = counterexample_threshold(n, p, alpha);

    ExperimentReport rep("counterexample");
    auto& tab = rep.add_table("scan", {"r", "upper", "tail", "lower", "volume_partial", "volume_bound",
                                       "inequality_fails", "constructible", "separation", "boundary_margin"});
    std::vector<double> lr, lu, ll;
    bool monotone = true, consistent = true, volume_ok = true, union_ok = true;
    bool seen_fail = false;
    int below = 0, built = 0;
    for (double r : radii) {
        const auto b = counterexample_bounds(n, p, alpha, r, N);
        lr.push_back(std::log(r));
        lu.push_back(std::log(b.upper));
        ll.push_back(std::log(b.lower));
        if (seen_fail && !b.inequality_fails) monotone = false;
        seen_fail = seen_fail || b.inequality_fails;
        consistent = consistent && (b.inequality_fails == (r < threshold));
        below += r < threshold;
        volume_ok = volume_ok && b.volume_partial <= b.volume_bound;
        double sep = std::numeric_limits<double>::quiet_NaN(), margin = sep;
        if (b.constructible && (n == 2 || n == 3)) {
            const auto U = build_counterexample(n, p, alpha, r, N, seed);
            sep = U.separation_holds ? 1.0 : 0.0;
            margin = std::numeric_limits<double>::infinity();
            for (const auto& ball : U.balls) {
                const double floor = std::pow(ball.radius, 1.0 / alpha);
                for (const auto& dir : probe_directions(n, 32)) {
                    Vec3 x{};
                    for (int i = 0; i < 3; ++i) x[i] = ball.center[i] + ball.radius * dir[i];
                    margin = std::min(margin, norm(x) - floor);
                }
            }
            union_ok = union_ok && U.separation_holds && margin >= 0.0;
            ++built;
        }
        tab.add_row({r, b.upper, b.tail, b.lower, b.volume_partial, b.volume_bound, b.inequality_fails ? 1.0 : 0.0,
                     b.constructible ? 1.0 : 0.0, sep, margin});
    }
    const auto su = least_squares(lr, lu), sl = least_squares(lr, ll);
    rep.add_scalar("threshold_r", threshold);
    rep.add_scalar("beta", beta);
    rep.add_scalar("slope_upper", su.slope);
    rep.add_scalar("slope_lower", sl.slope);
    rep.add_scalar("radii_below_threshold", below);
    rep.add_scalar("unions_built", built);
    rep.add_verdict("fails_below_threshold", consistent && below > 0,
                    "U + tail < L exactly for the scanned r below " + format_short(threshold) + " (at least one)");
    rep.add_verdict("monotone_in_r", monotone, "once U + tail < L at some r, it holds for all smaller r");
    rep.add_verdict("slope_upper", std::abs(su.slope - beta) <= slope_tol * std::abs(beta),
                    "log-log slope of U within " + format_short(slope_tol) + " relative of n-1+p/alpha");
    rep.add_verdict("slope_lower", std::abs(sl.slope - g) <= slope_tol * std::abs(g),
                    "log-log slope of L within " + format_short(slope_tol) + " relative of n-1+p");
    rep.add_verdict("volume_bound", volume_ok, "sum of ball volumes <= 2 omega_n r^n");
    if (built > 0)
        rep.add_verdict("boundary_separation", union_ok, "sampled boundary points satisfy |x| >= r_i^{1/alpha}");
    else
        rep.add_note("no scanned r below 2^-alpha; no union was built");
    return rep;
}

ExperimentReport origin_density_curve(const BallUnion& U, std::span<const double> rhos, std::size_t mc_samples,
                                      std::uint64_t seed, int strata) {
    if (mc_samples < 1000) throw AccuracyError("origin density needs at least 1000 Monte Carlo samples");
    if (strata < 1 || static_cast<std::size_t>(strata) > mc_samples) throw ArgumentError("invalid stratum count");
    const int n = U.n;
    const double wn = unit_ball_volume(n);
    ExperimentReport rep("origin-density");
    auto& tab = rep.add_table("density", {"rho", "estimate", "half_width", "bound", "candidates", "tail_fraction"});
    bool ok = true;
    for (double rho : rhos) {
        if (!(rho > 0.0)) throw ArgumentError("density radii must be positive");
        const double bound = 2.0 * std::pow(rho, n * (U.alpha - 1.0));
        std::vector<const Ball*> cand;
        for (const auto& b : U.balls)
            if (norm(b.center) - b.radius < rho) cand.push_back(&b);

        double estimate = 0.0, var = 0.0;
        std::size_t hits_total = 0;
        if (!cand.empty()) {
            for (int k = 0; k < strata; ++k) {
                const std::size_t m = mc_samples / strata + (static_cast<std::size_t>(k) < mc_samples % strata);
                const double t_lo = rho * std::pow(static_cast<double>(k) / strata, 1.0 / n);
                const double t_hi = rho * std::pow(static_cast<double>(k + 1) / strata, 1.0 / n);
                std::vector<const Ball*> local;
                for (const Ball* b : cand) {
                    const double c = norm(b->center);
                    if (c - b->radius < t_hi && c + b->radius > t_lo) local.push_back(b);
                }
                std::size_t hits = 0;
                if (!local.empty()) {
                    UnitBallSampler s(n, stratum_seed(seed, k));
                    for (std::size_t j = 0; j < m; ++j) {
                        const double t = rho * std::pow((k + s.uniform()) / strata, 1.0 / n);
                        Vec3 d = s.next();
                        double len = norm(d);
                        while (len < 1e-12) {
                            d = s.next();
                            len = norm(d);
                        }
                        Vec3 x{};
                        for (int i = 0; i < n; ++i) x[i] = t * d[i] / len;
                        for (const Ball* b : local) {
                            Vec3 y{};
                            for (int i = 0; i < 3; ++i) y[i] = x[i] - b->center[i];
                            if (dot(y, y) < b->radius * b->radius) {
                                ++hits;
                                break;
                            }
                        }
                    }
                }
                const double f = static_cast<double>(hits) / m;
                estimate += f / strata;
                var += f * (1.0 - f) / m / (static_cast<double>(strata) * strata);
                hits_total += hits;
            }
        }
        double half = 1.96 * std::sqrt(var);
        if (hits_total == 0) half = 3.0 / static_cast<double>(mc_samples);
        const double tail_fraction = U.volume_tail / (wn * std::pow(rho, n));
        ok = ok && estimate <= bound + half;
        tab.add_row({rho, estimate, half, bound, static_cast<double>(cand.size()), tail_fraction});
    }
    rep.add_scalar("mc_samples", static_cast<double>(mc_samples));
    rep.add_scalar("strata", strata);
    rep.add_verdict("density_bound", ok, "estimate <= 2 rho^{n(alpha-1)} + half-width at every rho");
    return rep;
}

// ---------------------------------------------------------------------------

ProbeShape probe_shape_from_string(const std::string& s) {
    if (s == "hyperplane") return ProbeShape::Hyperplane;
    if (s == "tangent-sphere") return ProbeShape::TangentSphere;
    throw ArgumentError("unknown probe shape '" + s + "' (hyperplane, tangent-sphere)");
}

std::string to_string(ProbeShape s) { return s == ProbeShape::Hyperplane ? "hyperplane" : "tangent-sphere"; }

MeasureValue truncated_perimeter(int n, double p, ProbeShape shape, double delta, double outer, double R) {
    if (n < 2) throw ArgumentError("probe needs n >= 2");
    if (!(delta > 0.0) || !(outer > delta)) throw ArgumentError("probe needs 0 < delta < outer");
    const double c = (n - 1) * unit_ball_volume(n - 1);
    const double g = n - 1.0 + p;
    if (shape == ProbeShape::Hyperplane) {
        const double v = g == 0.0 ? c * std::log(outer / delta) : c * (std::pow(outer, g) - std::pow(delta, g)) / g;
        return {v, 0.0};
    }
    if (!(R > 0.0)) throw DegenerateShape("tangent sphere needs R > 0");
    if (outer > 2.0 * R) throw ArgumentError("outer radius exceeds the tangent sphere's diameter");
    // |x| = 2R sin(phi/2) at angle phi from the tangency point; integrate in log phi.
    const double lo = std::log(2.0 * std::asin(delta / (2.0 * R)));
    const double hi = std::log(2.0 * std::asin(outer / (2.0 * R)));
    auto f = [&](double s) {
        const double phi = std::exp(s);
        return std::pow(2.0 * R * std::sin(0.5 * phi), p) * c * std::pow(R * std::sin(phi), n - 2) * R * phi;
    };
    return integrate_adaptive(f, lo, hi, 1e-13);
}

ExperimentReport divergence_probe(int n, double p, ProbeShape shape, std::span<const double> deltas, double outer,
                                  double R, double slope_tol) {
    const double g = n - 1.0 + p;
    if (g > 1e-12) throw ArgumentError("no divergence at the origin for p > 1 - n");
    if (deltas.size() < 2) throw ArgumentError("divergence probe needs at least two deltas");
    ExperimentReport rep("divergence-probe");
    auto& tab = rep.add_table("truncated", {"delta", "value", "error"});
    std::vector<double> ld, lv, v;
    for (double d : deltas) {
        const auto m = truncated_perimeter(n, p, shape, d, outer, R);
        tab.add_row({d, m.value, m.error});
        ld.push_back(std::log(d));
        lv.push_back(std::log(m.value));
        v.push_back(m.value);
    }
    const auto power = least_squares(ld, lv);
    rep.add_scalar("slope", power.slope);
    rep.add_scalar("expected_slope", g);
    if (std::abs(g) <= 1e-12) {
        // I(delta) ~ c log(1/delta) + const.
        std::vector<double> x;
        for (double l : ld) x.push_back(-l);
        const auto fit = least_squares(x, v);
        const double c = (n - 1) * unit_ball_volume(n - 1);
        rep.add_scalar("log_coefficient", fit.slope);
        rep.add_scalar("expected_log_coefficient", c);
        rep.add_note("p = 1 - n: logarithmic divergence");
        rep.add_verdict("log_growth", std::abs(fit.slope - c) <= slope_tol * c,
                        "coefficient of log(1/delta) within " + format_short(slope_tol) + " relative of (n-1) omega_{n-1}");
    } else {
        rep.add_verdict("power_slope", std::abs(power.slope - g) <= slope_tol * std::abs(g),
                        "log-log slope within " + format_short(slope_tol) + " relative of n-1+p");
    }
    return rep;
}

}  // namespace wiso
