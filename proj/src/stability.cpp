#include "wiso/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "wiso/profile.hpp"

namespace wiso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_radius(double r, int n) {
    if (!(r > 0.0)) throw ArgumentError("radius must be positive");
    if (n < 2) throw ArgumentError("dimension must be at least 2");
}

// |lhs - rhs| over the largest term; 0 when every term vanishes.
double relative_residual(double lhs, double rhs, std::initializer_list<double> terms) {
    double scale = 0.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs - rhs) / scale;
}

// int_a^b f with the profile's kinks as panel boundaries.
template <class F>
MeasureValue radial(const ConvexProfile& w, F&& f, double a, double b, double scale = 1.0) {
    std::vector<double> br;
    for (double c : w.breakpoints) br.push_back(c / scale);
    return integrate_piecewise(f, a, b, br, 1e-13);
}

// Ball integrals int_{B_r} e^w g(|x|) dx = n omega_n int_0^r t^{n-1} e^{w(t)} g(t) dt.
struct BallIntegrals {
    MeasureValue mass;        // |B_r|_w
    MeasureValue sq_plus_dd;  // e^w (w'^2 + w'')
    MeasureValue over_t;      // e^w w'/|x|
    MeasureValue times_t;     // e^w |x| w'
};

BallIntegrals ball_integrals(const ConvexProfile& w, double r, int n) {
    const double s = unit_sphere_area(n);
    auto e = [&](double t) { return std::exp(w.w(t)); };
    auto scaled = [s](MeasureValue v) { return MeasureValue{s * v.value, s * v.error}; };
    BallIntegrals out;
    out.mass = scaled(radial(w, [&](double t) { return std::pow(t, n - 1) * e(t); }, 0.0, r));
    out.sq_plus_dd = scaled(radial(
        w, [&](double t) { return std::pow(t, n - 1) * e(t) * (w.dw(t) * w.dw(t) + w.d2w(t)); }, 0.0, r));
    out.over_t = scaled(radial(w, [&](double t) { return std::pow(t, n - 2) * e(t) * w.dw(t); }, 0.0, r));
    out.times_t = scaled(radial(w, [&](double t) { return std::pow(t, n) * e(t) * w.dw(t); }, 0.0, r));
    return out;
}

double exp_weight(const ConvexProfile& w, double t) { return std::exp(w.w(t)); }

// Second differences with Richardson extrapolation and an error budget made
// of the truncation estimate plus propagated evaluation noise.
struct Extrapolated {
    double coarse = 0.0, fine = 0.0, value = 0.0, budget = 0.0;
};

Extrapolated richardson(double d_h, double d_h2, double noise_h, double noise_h2) {
    Extrapolated e;
    e.coarse = d_h;
    e.fine = d_h2;
    e.value = (4.0 * d_h2 - d_h) / 3.0;
    e.budget = std::abs(d_h2 - d_h) / 3.0 + (4.0 * noise_h2 + noise_h) / 3.0;
    return e;
}

// Data of one translated ball on the fixed-volume family.
struct FamilyPoint {
    double rho = 0.0;
    double rho_noise = 0.0;
    double perimeter = 0.0;
    double perimeter_noise = 0.0;
};

FamilyPoint family_point(const RadialWeight& W, const ConvexProfile& w, double r, int n, double eps) {
    const auto sol = solve_rho(W, r, n, eps);
    const auto m = offcenter_ball_measures(W, OffCenterBall(n, eps, sol.rho));
    const double target = ball_volume(W, r, n).value;
    FamilyPoint p;
    p.rho = sol.rho;
    // A volume error dV moves rho by dV / P_w.
    p.rho_noise = (m.volume.error + std::abs(sol.relative_residual) * target) / m.perimeter.value +
                  std::numeric_limits<double>::epsilon() * sol.rho;
    p.perimeter = m.perimeter.value;
    const double dp_drho = m.perimeter.value * ((n - 1) / sol.rho + std::abs(w.dw(sol.rho + std::abs(eps))));
    p.perimeter_noise = m.perimeter.error + dp_drho * p.rho_noise;
    return p;
}

double ratio_error(const MeasureValue& num, const MeasureValue& den) {
    if (den.value == 0.0) return kNaN;
    const double q = num.value / (den.value * den.value);
    if (num.value == 0.0) return num.error / (den.value * den.value);
    return std::abs(q) * (num.error / std::abs(num.value) + 2.0 * den.error / std::abs(den.value));
}

void fill_ratios(StabilityReport& s, double r, int n, double weight_at_r) {
    s.ratio_fuglede = s.grad_sq > 0.0 ? s.deficit.value / (std::pow(r, n - 1) * weight_at_r * s.grad_sq) : kNaN;
    if (s.symdiff.value > 0.0) {
        s.ratio_quant = s.deficit.value / (s.symdiff.value * s.symdiff.value);
        s.ratio_quant_error = ratio_error(s.deficit, s.symdiff);
    } else {
        s.ratio_quant = kNaN;
        s.ratio_quant_error = kNaN;
    }
}

}  // namespace

// ---------------------------------------------------------------------------

TaylorCoefficients taylor_coefficients(const ConvexProfile& w, double r, int n) {
    require_radius(r, n);
    auto e = [&](double t) { return std::exp(w.w(r * t)); };
    const auto a = radial(w, [&](double t) { return std::pow(t, n - 1) * e(t); }, 0.0, 1.0, r);
    const auto b = radial(w, [&](double t) { return std::pow(t, n) * w.dw(r * t) * e(t); }, 0.0, 1.0, r);
    const auto c = radial(w, [&](double t) { return std::pow(t, n + 1) * w.d2w(r * t) * e(t); }, 0.0, 1.0, r);
    const auto d = radial(
        w, [&](double t) { return std::pow(t, n + 1) * w.dw(r * t) * w.dw(r * t) * e(t); }, 0.0, 1.0, r);

    TaylorCoefficients out{a.value, b.value, c.value, d.value};
    out.quadrature_error = std::max({a.error, b.error, c.error, d.error});
    const double ew = exp_weight(w, r);
    out.residual_first = relative_residual(r * out.b, ew - n * out.a, {r * out.b, ew, n * out.a});
    const double lhs = r * r * (out.c + out.d);
    const double rhs = r * w.dw(r) * ew - (n + 1) * (ew - n * out.a);
    out.residual_second =
        relative_residual(lhs, rhs, {lhs, r * w.dw(r) * ew, (n + 1) * ew, (n + 1) * n * out.a});
    return out;
}

DivergenceIdentities divergence_identities(const ConvexProfile& w, double r, int n) {
    require_radius(r, n);
    const auto I = ball_integrals(w, r, n);
    const double P = unit_sphere_area(n) * std::pow(r, n - 1) * exp_weight(w, r);
    DivergenceIdentities d;
    d.lhs_first = (n - 1) * I.over_t.value;
    d.rhs_first = w.dw(r) * P - I.sq_plus_dd.value;
    d.residual_first = relative_residual(d.lhs_first, d.rhs_first, {d.lhs_first, w.dw(r) * P, I.sq_plus_dd.value});
    d.lhs_second = I.times_t.value;
    d.rhs_second = r * P - n * I.mass.value;
    d.residual_second = relative_residual(d.lhs_second, d.rhs_second, {d.lhs_second, r * P, n * I.mass.value});
    d.quadrature_error = std::max({I.mass.error, I.sq_plus_dd.error, I.over_t.error, I.times_t.error});
    return d;
}

MeasureValue rho_second_derivative(const ConvexProfile& w, double r, int n) {
    require_radius(r, n);
    const auto I = ball_integrals(w, r, n);
    const double A = I.sq_plus_dd.value + (n - 1) * I.over_t.value;
    const double eA = I.sq_plus_dd.error + (n - 1) * I.over_t.error;
    const double D = n * I.mass.value + I.times_t.value;
    const double eD = n * I.mass.error + I.times_t.error;
    const double v = -(r / n) * A / D + 0.0;  // no negative zero in reports
    const double err = (r / n) * (eA / D + std::abs(A) * eD / (D * D));
    return {v, err};
}

MeasureValue perimeter_second_derivative(const ConvexProfile& w, double r, int n) {
    const auto rpp = rho_second_derivative(w, r, n);
    const double P = unit_sphere_area(n) * std::pow(r, n - 1) * exp_weight(w, r);
    const double g = (n - 1) / r + w.dw(r);
    const double tail = (w.dw(r) * w.dw(r) + w.d2w(r) + (n - 1) * w.dw(r) / r) / n;
    return {P * (rpp.value * g + tail), P * std::abs(g) * rpp.error};
}

// ---------------------------------------------------------------------------

HarmonicCoefficients random_direction(int n, int max_degree, std::uint64_t seed, int min_degree) {
    if (max_degree < min_degree || min_degree < 0) throw ArgumentError("random direction needs 0 <= min_degree <= max_degree");
    auto c = HarmonicCoefficients::zeros(n, max_degree);
    UnitBallSampler rng(n, seed);
    for (int k = min_degree; k <= max_degree; ++k)
        for (int i = 1; i <= harmonic_multiplicity(n, k); ++i)
            c.at(k, i) = (2.0 * rng.uniform() - 1.0) / ((1.0 + k) * (1.0 + k));
    return c;
}

double w1inf_norm(const HarmonicCoefficients& u, const MeasureGrid& grid) {
    const auto s = sample_w1inf(NearlySphericalSet{u.n, 1.0, u}, grid.table());
    return s.sup_u + s.sup_grad_u;
}

MatchedSet volume_matched_perturbation(const RadialWeight& W, double r, const HarmonicCoefficients& direction,
                                       double amplitude, const MeasureGrid& grid, bool euclidean) {
    const int n = direction.n;
    require_radius(r, n);
    if (n != grid.dimension()) throw ArgumentError("direction dimension does not match the grid");
    const double target = ball_volume(W, r, n, euclidean).value;
    const double y01 = 1.0 / std::sqrt(unit_sphere_area(n));

    MatchedSet out;
    out.set = NearlySphericalSet{n, r, amplitude * direction};
    const double base0 = out.set.u.at(0, 1);
    auto defect = [&](double c0) {
        out.set.u.at(0, 1) = base0 + c0;
        return volume_nearly_spherical(W, out.set, grid, euclidean, false).value - target;
    };

    // Secant iteration from the linearised step.
    const double slope0 = y01 * r * (euclidean ? unit_sphere_area(n) * std::pow(r, n - 1) : ball_perimeter(W, r, n).value);
    double c_prev = 0.0, f_prev = defect(0.0);
    double c = c_prev, f = f_prev;
    int it = 0;
    if (f_prev != 0.0) {
        c = -f_prev / slope0;
        f = defect(c);
        for (it = 1; it < 60 && std::abs(f) > 1e-13 * target; ++it) {
            const double slope = (f - f_prev) / (c - c_prev);
            if (!(slope > 0.0) || !std::isfinite(slope)) throw SolverError("volume matching: secant slope lost monotonicity");
            c_prev = c;
            f_prev = f;
            c -= f / slope;
            if (c == c_prev) break;
            f = defect(c);
        }
        if (std::abs(f) > 1e-12 * target)
            throw SolverError("volume matching did not converge, residual " + format_short(f / target));
    }
    out.set.u.at(0, 1) = base0 + c;
    out.c0 = c;
    out.relative_residual = f / target;
    out.iterations = it;
    if (sample_w1inf(out.set, grid.table()).sup_u >= 0.5)
        throw DegenerateShape("volume-matched perturbation has sup |u| >= 1/2");
    return out;
}

// ---------------------------------------------------------------------------

nlohmann::ordered_json StabilityReport::to_json() const {
    nlohmann::ordered_json j;
    j["deficit"] = deficit.value;
    j["deficit_error"] = deficit.error;
    j["grad_sq"] = grad_sq;
    j["l2_sq"] = l2_sq;
    j["symdiff"] = symdiff.value;
    j["symdiff_error"] = symdiff.error;
    j["ratio_fuglede"] = std::isfinite(ratio_fuglede) ? nlohmann::ordered_json(ratio_fuglede) : nlohmann::ordered_json();
    j["ratio_quant"] = std::isfinite(ratio_quant) ? nlohmann::ordered_json(ratio_quant) : nlohmann::ordered_json();
    j["ratio_quant_error"] =
        std::isfinite(ratio_quant_error) ? nlohmann::ordered_json(ratio_quant_error) : nlohmann::ordered_json();
    j["degenerate"] = degenerate;
    j["volume_mismatch"] = volume_mismatch;
    j["volume_matched"] = volume_matched;
    j["w1inf"] = w1inf;
    return j;
}

StabilityReport fuglede_report(const RadialWeight& W, const NearlySphericalSet& E, const MeasureGrid& grid,
                               double volume_tol, bool with_symdiff) {
    const bool euclidean = W.is_power();
    const int n = E.n;
    const double target = ball_volume(W, E.r, n, euclidean).value;
    const auto vol = volume_nearly_spherical(W, E, grid, euclidean);
    StabilityReport s;
    s.volume_mismatch = std::abs(vol.value - target) / target;
    s.volume_matched = s.volume_mismatch <= volume_tol;
    if (!s.volume_matched)
        throw VolumeMismatch("|E| differs from |B_r| by " + format_short(s.volume_mismatch) + " relative");
    const auto per = perimeter_nearly_spherical(W, E, grid);
    s.deficit = {per.value - ball_perimeter(W, E.r, n).value, per.error};
    const auto norms = sobolev_norms(E.u);
    s.grad_sq = norms.grad_sq;
    s.l2_sq = norms.l2_sq;
    s.degenerate = norms.l2_sq == 0.0;
    if (!with_symdiff)
        s.symdiff = {kNaN, 0.0};
    else if (!s.degenerate)
        s.symdiff = symdiff_measure(W, E, E.r, grid.resolution(), euclidean);
    s.w1inf = w1inf_norm(E.u, grid);
    fill_ratios(s, E.r, n, W.value(E.r));
    return s;
}

StabilityReport quantitative_ratio(const RadialWeight& W, const NearlySphericalSet& E, const MeasureGrid& grid,
                                   double volume_tol) {
    return fuglede_report(W, E, grid, volume_tol);
}

StabilityReport quantitative_ratio(const RadialWeight& W, double r, const OffCenterBall& B, double volume_tol) {
    const bool euclidean = W.is_power();
    const int n = B.n;
    require_radius(r, n);
    const auto m = offcenter_ball_measures(W, B, euclidean);
    const double target = ball_volume(W, r, n, euclidean).value;
    StabilityReport s;
    s.volume_mismatch = std::abs(m.volume.value - target) / target;
    s.volume_matched = s.volume_mismatch <= volume_tol;
    if (!s.volume_matched)
        throw VolumeMismatch("translated ball volume differs from |B_r| by " + format_short(s.volume_mismatch));
    s.deficit = {m.perimeter.value - ball_perimeter(W, r, n).value, m.perimeter.error};
    s.degenerate = B.eps == 0.0 && B.rho == r;
    s.symdiff = s.degenerate ? MeasureValue{0.0, 0.0} : symdiff_measure(W, B, r, euclidean);
    s.grad_sq = kNaN;
    s.l2_sq = kNaN;
    s.w1inf = kNaN;
    fill_ratios(s, r, n, W.value(r));
    s.ratio_fuglede = kNaN;
    return s;
}

// ---------------------------------------------------------------------------

ExperimentReport translated_ball_scan(const ConvexProfile& w, double r, int n, std::span<const double> eps,
                                      double decay) {
    require_radius(r, n);
    if (eps.size() < 2) throw ArgumentError("translated-ball scan needs at least two eps values");
    const RadialWeight W = RadialWeight::exp_convex(w);
    ExperimentReport rep("translated-ball-ratio");
    auto& tab = rep.add_table("family", {"eps", "rho", "deficit", "deficit_error", "symdiff", "symdiff_error",
                                         "ratio", "ratio_error"});
    std::vector<double> ratios;
    bool nonneg = true;
    for (double e : eps) {
        if (!(e > 0.0)) throw ArgumentError("scan eps values must be positive");
        const auto sol = solve_rho(W, r, n, e);
        const auto s = quantitative_ratio(W, r, OffCenterBall(n, e, sol.rho));
        nonneg = nonneg && s.deficit.value >= -s.deficit.error;
        ratios.push_back(s.ratio_quant);
        tab.add_row({e, sol.rho, s.deficit.value, s.deficit.error, s.symdiff.value, s.symdiff.error, s.ratio_quant,
                     s.ratio_quant_error});
    }
    const double first = ratios.front(), last = ratios.back();
    rep.add_scalar("ratio_first", first);
    rep.add_scalar("ratio_last", last);
    rep.add_scalar("decay_factor", first / last);
    rep.add_scalar("w2_at_r", w.d2w(r));
    rep.add_verdict("deficit_nonnegative", nonneg, "every deficit >= -(its quadrature error)");
    if (std::abs(w.d2w(r)) < 1e-12) {
        bool monotone = true;
        for (std::size_t i = 1; i < ratios.size(); ++i) monotone = monotone && ratios[i] < ratios[i - 1];
        rep.add_verdict("ratio_decays", monotone && first / last >= decay,
                        "w''(r) = 0: ratio decreases monotonically, by >= " + format_short(decay) + "x overall");
    } else {
        bool positive = std::all_of(ratios.begin(), ratios.end(), [](double q) { return q > 0.0; });
        rep.add_verdict("ratio_bounded_below", positive && last >= first / decay,
                        "w''(r) > 0: ratio stays positive and within a factor " + format_short(decay));
    }
    return rep;
}

ExperimentReport expansion_check(const ConvexProfile& w, double r, int n, double h) {
    require_radius(r, n);
    if (!(h > 0.0) || h >= r) throw ArgumentError("finite-difference step must lie in (0, r)");
    const RadialWeight W = RadialWeight::exp_convex(w);
    ExperimentReport rep("expansion-check");

    const auto pp = family_point(W, w, r, n, h), pm = family_point(W, w, r, n, -h);
    const auto qp = family_point(W, w, r, n, 0.5 * h), qm = family_point(W, w, r, n, -0.5 * h);
    const double P0 = ball_perimeter(W, r, n).value;
    const double h2 = 0.5 * h;

    const double rho1 = (pp.rho - pm.rho) / (2.0 * h);
    const double rho1_noise = (pp.rho_noise + pm.rho_noise) / (2.0 * h);
    rep.add_scalar("rho_prime_fd", rho1, rho1_noise);
    rep.add_verdict("rho_prime_zero", std::abs(rho1) <= 1e-6, "|central difference of rho at 0| <= 1e-6");

    const auto rho2 = richardson((pp.rho - 2.0 * r + pm.rho) / (h * h), (qp.rho - 2.0 * r + qm.rho) / (h2 * h2),
                                 (pp.rho_noise + pm.rho_noise) / (h * h), (qp.rho_noise + qm.rho_noise) / (h2 * h2));
    const auto rho2_formula = rho_second_derivative(w, r, n);
    const double rho2_budget = rho2.budget + rho2_formula.error;
    rep.add_scalar("rho_second_formula", rho2_formula.value, rho2_formula.error);
    rep.add_scalar("rho_second_fd_h", rho2.coarse);
    rep.add_scalar("rho_second_fd_h2", rho2.fine);
    rep.add_scalar("rho_second_fd", rho2.value, rho2_budget);
    const double rho2_gap = std::abs(rho2.value - rho2_formula.value);
    rep.add_scalar("rho_second_gap", rho2_gap);
    rep.add_verdict("rho_second_matches", rho2_gap <= 1e-3 * std::abs(rho2_formula.value) + rho2_budget,
                    "|FD - closed form| <= 1e-3 |closed form| + FD error budget");

    const auto per2 = richardson((pp.perimeter - 2.0 * P0 + pm.perimeter) / (h * h),
                                 (qp.perimeter - 2.0 * P0 + qm.perimeter) / (h2 * h2),
                                 (pp.perimeter_noise + pm.perimeter_noise) / (h * h),
                                 (qp.perimeter_noise + qm.perimeter_noise) / (h2 * h2));
    const auto per2_formula = perimeter_second_derivative(w, r, n);
    const double per2_budget = per2.budget + per2_formula.error;
    rep.add_scalar("perimeter_second_formula", per2_formula.value, per2_formula.error);
    rep.add_scalar("perimeter_second_fd_h", per2.coarse);
    rep.add_scalar("perimeter_second_fd_h2", per2.fine);
    rep.add_scalar("perimeter_second_fd", per2.value, per2_budget);
    const double per2_gap = std::abs(per2.value - per2_formula.value);
    rep.add_verdict("perimeter_second_matches", per2_gap <= 1e-3 * std::abs(per2_formula.value) + per2_budget,
                    "|FD - closed form| <= 1e-3 |closed form| + FD error budget");
    if (std::abs(w.d2w(r)) < 1e-12) {
        rep.add_verdict("perimeter_second_vanishes", std::abs(per2.value) <= per2_budget,
                        "w''(r) = 0: second difference within its error budget of 0");
    } else {
        rep.add_verdict("perimeter_second_positive", per2.value - per2_budget > 0.0,
                        "w''(r) > 0: second difference exceeds its error budget");
    }
    auto& tab = rep.add_table("family", {"eps", "rho", "rho_noise", "perimeter", "perimeter_noise"});
    tab.add_row({-h, pm.rho, pm.rho_noise, pm.perimeter, pm.perimeter_noise});
    tab.add_row({-h2, qm.rho, qm.rho_noise, qm.perimeter, qm.perimeter_noise});
    tab.add_row({0.0, r, 0.0, P0, 0.0});
    tab.add_row({h2, qp.rho, qp.rho_noise, qp.perimeter, qp.perimeter_noise});
    tab.add_row({h, pp.rho, pp.rho_noise, pp.perimeter, pp.perimeter_noise});
    return rep;
}

ExperimentReport degenerate_expansion_check(const ConvexProfile& w, double r, int n, double h) {
    if (!(std::abs(w.d2w(r)) < 1e-12))
        throw PreconditionError("degenerate expansion needs |w''(r)| < 1e-12, got " + format_short(w.d2w(r)));
    return expansion_check(w, r, n, h);
}

// ---------------------------------------------------------------------------

ExperimentReport ellipsoid_sharpness_scan(const RadialWeight& W, double r, int n, std::span<const double> ts,
                                          int resolution, double band) {
    require_radius(r, n);
    if (n != 2 && n != 3) throw UnsupportedDimension("ellipsoid scan needs n = 2 or 3");
    if (ts.empty()) throw ArgumentError("ellipsoid scan needs at least one eccentricity");
    const bool euclidean = W.is_power();
    const double target = ball_volume(W, r, n, euclidean).value;
    const double P0 = ball_perimeter(W, r, n).value;

    ExperimentReport rep("ellipsoid-sharpness");
    auto& tab = rep.add_table("family", {"t", "scale", "deficit", "deficit_error", "symdiff", "symdiff_error",
                                         "ratio", "ratio_error"});
    std::vector<double> tv, deficits, symdiffs, ratios;
    for (double t : ts) {
        if (!(t >= 0.0) || !(t < 1.0)) throw ArgumentError("eccentricities must lie in [0, 1)");
        const double s = 1.0 + t;
        std::vector<double> base(static_cast<std::size_t>(n), r * std::pow(s, -1.0 / (n - 1)));
        base[0] = r * s;
        auto scaled = [&](double lam) {
            std::vector<double> a = base;
            for (double& x : a) x *= lam;
            return Ellipsoid(a);
        };
        double lam = 1.0;
        if (t > 0.0) {
            auto f = [&](double l) { return ellipsoid_measures(W, scaled(l), resolution, euclidean).volume.value - target; };
            std::uintmax_t iters = 100;
            const auto br = boost::math::tools::toms748_solve(f, 0.5, 2.0, boost::math::tools::eps_tolerance<double>(50), iters);
            lam = 0.5 * (br.first + br.second);
        }
        const Ellipsoid E = scaled(lam);
        const auto m = ellipsoid_measures(W, E, resolution, euclidean);
        const MeasureValue deficit{m.perimeter.value - P0, m.perimeter.error};
        const MeasureValue sd = t > 0.0 ? symdiff_measure(W, E, r, resolution, euclidean) : MeasureValue{0.0, 0.0};
        const double ratio = sd.value > 0.0 ? deficit.value / (sd.value * sd.value) : kNaN;
        tab.add_row({t, lam, deficit.value, deficit.error, sd.value, sd.error, ratio, ratio_error(deficit, sd)});
        if (t > 0.0) {
            tv.push_back(t);
            deficits.push_back(deficit.value);
            symdiffs.push_back(sd.value);
            ratios.push_back(ratio);
        } else {
            rep.add_scalar("ball_deficit", deficit.value, deficit.error);
        }
    }
    if (ratios.empty()) {
        rep.add_note("only t = 0 requested; no ratios to compare");
        return rep;
    }
    const auto [rmin, rmax] = std::minmax_element(ratios.begin(), ratios.end());
    const auto [smin, smax] = std::minmax_element(symdiffs.begin(), symdiffs.end());
    rep.add_scalar("ratio_min", *rmin);
    rep.add_scalar("ratio_max", *rmax);
    rep.add_scalar("band", *rmax / *rmin);
    rep.add_scalar("symdiff_span", *smax / *smin);
    rep.add_verdict("ratio_band", *rmin > 0.0 && *rmax / *rmin <= band,
                    "deficit / symdiff^2 within a band of width <= " + format_short(band));

    auto& sc = rep.add_table("halving", {"t", "deficit_ratio"});
    bool quadratic = true;
    for (std::size_t i = 0; i + 1 < tv.size(); ++i) {
        if (std::abs(tv[i + 1] - 0.5 * tv[i]) > 1e-12 * tv[i]) continue;
        const double q = deficits[i + 1] / deficits[i];
        sc.add_row({tv[i], q});
        quadratic = quadratic && q >= 0.2 && q <= 0.3;
    }
    if (sc.rows.empty())
        rep.add_note("no consecutive halving pairs; deficit scaling not checked");
    else
        rep.add_verdict("deficit_quadratic", quadratic, "deficit(t/2) / deficit(t) in [0.2, 0.3]");
    return rep;
}

ExperimentReport fuglede_sweep(const RadialWeight& W, double r, int n, const FugledeSweepOptions& opt) {
    require_radius(r, n);
    if (opt.seeds < 1) throw ArgumentError("fuglede sweep needs at least one seed");
    const MeasureGrid grid(n, opt.resolution > 0 ? opt.resolution : default_resolution(n), opt.max_degree);
    const bool euclidean = W.is_power();
    ExperimentReport rep("fuglede");
    auto& tab = rep.add_table("perturbations", {"seed", "amplitude", "c0", "w1inf", "deficit", "deficit_error",
                                                "grad_sq", "ratio_fuglede", "ratio_quant", "deficit_half",
                                                "halving_ratio"});
    bool nonneg = true, above = true, quadratic = true, small = true;
    double min_ratio = std::numeric_limits<double>::infinity(), worst_scaling = 0.0;
    for (int k = 0; k < opt.seeds; ++k) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(k);
        auto dir = random_direction(n, opt.max_degree, seed, opt.min_degree);
        dir *= 1.0 / w1inf_norm(dir, grid);
        const auto full = volume_matched_perturbation(W, r, dir, opt.amplitude, grid, euclidean);
        const auto half = volume_matched_perturbation(W, r, dir, 0.5 * opt.amplitude, grid, euclidean);
        const auto s = fuglede_report(W, full.set, grid, 1e-10, opt.quantitative);
        const auto sh = fuglede_report(W, half.set, grid, 1e-10, false);
        const double q = sh.deficit.value / s.deficit.value;
        nonneg = nonneg && s.deficit.value >= -s.deficit.error && sh.deficit.value >= -sh.deficit.error;
        above = above && s.ratio_fuglede >= opt.ratio_floor;
        small = small && s.w1inf <= opt.w1inf_bound;
        quadratic = quadratic && std::abs(4.0 * q - 1.0) <= opt.scaling_tol;
        min_ratio = std::min(min_ratio, s.ratio_fuglede);
        worst_scaling = std::max(worst_scaling, std::abs(4.0 * q - 1.0));
        tab.add_row({static_cast<double>(seed), opt.amplitude, full.c0, s.w1inf, s.deficit.value, s.deficit.error,
                     s.grad_sq, s.ratio_fuglede, s.ratio_quant, sh.deficit.value, q});
    }
    rep.add_scalar("min_ratio_fuglede", min_ratio);
    rep.add_scalar("worst_scaling_deviation", worst_scaling);
    rep.add_verdict("w1inf_bound", small, "sup |u| + sup |grad u| <= " + format_short(opt.w1inf_bound));
    rep.add_verdict("deficit_nonnegative", nonneg, "every deficit >= -(its quadrature error)");
    rep.add_verdict("ratio_fuglede_floor", above, "empirical Fuglede ratio >= " + format_short(opt.ratio_floor));
    rep.add_verdict("quadratic_scaling", quadratic,
                    "deficit(a/2) / deficit(a) within " + format_short(opt.scaling_tol) + " relative of 1/4");
    return rep;
}

}  // namespace wiso
