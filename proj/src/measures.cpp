#include "wiso/measures.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "wiso/report.hpp"

namespace wiso {

namespace {

constexpr double kRoundoff = 64.0 * std::numeric_limits<double>::epsilon();

// Integral of f over [a, b] with a fixed Gauss-Legendre rule.
template <class F>
double gl_integral(F&& f, double a, double b, int order) {
    const auto& gl = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return half * s;
}

void require_table(const NearlySphericalSet& E, const MeasureGrid& grid) {
    if (E.n != grid.dimension()) throw ArgumentError("set dimension does not match the measure grid");
    if (E.u.max_degree > grid.max_degree())
        throw ArgumentError("set degree " + std::to_string(E.u.max_degree) + " exceeds grid degree " +
                            std::to_string(grid.max_degree()));
}

// Root of g on [a, b] where g(a) and g(b) differ in sign.
template <class G>
double refine_root(G&& g, double a, double b) {
    double fa = g(a), fb = g(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t iters = 200;
    const auto res = boost::math::tools::toms748_solve(g, a, b, fa, fb,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (res.first + res.second);
}

double sphere_sum(const SphereRule& rule, const std::vector<double>& v, double* abs_sum = nullptr) {
    double s = 0.0, a = 0.0;
    const auto& w = rule.weights();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw IntegrandError("non-finite integrand at sphere node " + std::to_string(i));
        s += w[i] * v[i];
        a += w[i] * std::abs(v[i]);
    }
    if (abs_sum) *abs_sum = a;
    return s;
}

}  // namespace

MeasureGrid::MeasureGrid(int n, int resolution, int max_degree, int radial_order)
    : n_(n), radial_order_(radial_order) {
    if (radial_order < 4) throw ArgumentError("radial order must be >= 4");
    fine_ = std::make_unique<SphereRule>(build_sphere_rule(n, resolution));
    coarse_ = std::make_unique<SphereRule>(build_sphere_rule(n, std::max(2, resolution / 2)));
    table_ = std::make_unique<BasisTable>(*fine_, max_degree);
    coarse_table_ = std::make_unique<BasisTable>(*coarse_, max_degree);
}

MeasureValue ball_perimeter(const RadialWeight& W, double r, int n) {
    if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
    return {unit_sphere_area(n) * std::pow(r, n - 1) * eval_weight(W, r), 0.0};
}

MeasureValue ball_volume(const RadialWeight& W, double r, int n, bool euclidean) {
    if (!(r >= 0.0)) throw ArgumentError("ball radius must be non-negative");
    if (euclidean) return {unit_ball_volume(n) * std::pow(r, n), 0.0};
    if (W.is_power()) {
        const double e = n + W.exponent();
        if (e <= 0.0)
            throw DomainError("weighted volume of a ball diverges for p = " + format_short(W.exponent()) +
                              " <= -n; use the Euclidean volume");
        return {unit_sphere_area(n) * std::pow(r, e) / e, 0.0};
    }
    if (r == 0.0) return {0.0, 0.0};
    const double c = unit_sphere_area(n);
    const auto I = integrate_piecewise([&](double t) { return std::pow(t, n - 1) * W.value(t); }, 0.0, r,
                                       W.breakpoints(), 1e-14);
    return {c * I.value, c * I.error};
}

double layer_mass(const RadialWeight& W, int n, double a, double b, bool euclidean, int order) {
    if (a == b) return 0.0;
    if (euclidean) return (std::pow(b, n) - std::pow(a, n)) / n;
    if (W.is_power()) {
        const double e = n + W.exponent();
        if (std::min(a, b) <= 0.0 && e <= 0.0)
            throw DomainError("power-weighted layer touching the origin diverges");
        if (e == 0.0) return std::log(b / a);
        return (std::pow(b, e) - std::pow(a, e)) / e;
    }
    const double lo = std::min(a, b), hi = std::max(a, b);
    double cut_lo = lo, s = 0.0;
    auto f = [&](double t) { return std::pow(t, n - 1) * W.value(t); };
    for (double c : W.breakpoints()) {
        if (c > lo && c < hi) {
            s += gl_integral(f, cut_lo, c, order);
            cut_lo = c;
        }
    }
    s += gl_integral(f, cut_lo, hi, order);
    return b > a ? s : -s;
}

MeasureValue perimeter_nearly_spherical(const RadialWeight& W, const NearlySphericalSet& E,
                                        const MeasureGrid& grid, bool estimate_error) {
    require_table(E, grid);
    auto eval = [&](const BasisTable& table, double* abs_sum) {
        const auto el = surface_elements(E, table);
        std::vector<double> v(el.size());
        for (std::size_t i = 0; i < el.size(); ++i) v[i] = el[i].jacobian * W.value(el[i].radius);
        return sphere_sum(table.rule(), v, abs_sum);
    };
    double mag = 0.0;
    const double fine = eval(grid.table(), &mag);
    if (!estimate_error) return {fine, 0.0};
    const double coarse = eval(grid.coarse_table(), nullptr);
    return {fine, std::abs(fine - coarse) + kRoundoff * mag};
}

MeasureValue volume_nearly_spherical(const RadialWeight& W, const NearlySphericalSet& E,
                                     const MeasureGrid& grid, bool euclidean, bool estimate_error) {
    require_table(E, grid);
    auto eval = [&](const BasisTable& table, int order, double* abs_sum) {
        const auto f = table.synthesize(E.u);
        std::vector<double> v(f.values.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double s = 1.0 + f.values[i];
            if (!(s > 0.0)) throw DegenerateShape("1 + u <= 0 at sphere node " + std::to_string(i));
            v[i] = layer_mass(W, E.n, 0.0, E.r * s, euclidean, order);
        }
        return sphere_sum(table.rule(), v, abs_sum);
    };
    double mag = 0.0;
    const int order = grid.radial_order();
    const double fine = eval(grid.table(), order, &mag);
    if (!estimate_error) return {fine, 0.0};
    const double coarse = eval(grid.coarse_table(), order, nullptr);
    const double half_order = euclidean ? fine : eval(grid.table(), order / 2, nullptr);
    return {fine, std::abs(fine - coarse) + std::abs(fine - half_order) + kRoundoff * mag};
}

BodyMeasures offcenter_ball_measures(const RadialWeight& W, const OffCenterBall& B, bool euclidean_volume,
                                     double rel_tol) {
    const int n = B.n;
    const double rho = B.rho, eps = B.eps;
    const double ring = (n - 1) * unit_ball_volume(n - 1);
    const double pi = std::numbers::pi;
    const auto& bps = W.breakpoints();

    // Polar angles where the circle of radius a about eps e_1 crosses |x| = b.
    auto angle_breaks = [&](double a) {
        std::vector<double> out;
        if (eps == 0.0 || a == 0.0) return out;
        for (double b : bps) {
            const double c = (b * b - a * a - eps * eps) / (2.0 * a * eps);
            if (c > -1.0 && c < 1.0) out.push_back(std::acos(c));
        }
        return out;
    };
    auto dist = [&](double a, double th) {
        return std::sqrt(std::max(0.0, a * a + eps * eps + 2.0 * a * eps * std::cos(th)));
    };
    auto sin_pow = [n](double th) { return n == 2 ? 1.0 : std::pow(std::sin(th), n - 2); };

    BodyMeasures out;
    {
        const auto br = angle_breaks(rho);
        const auto I = integrate_piecewise([&](double th) { return sin_pow(th) * W.value(dist(rho, th)); }, 0.0,
                                           pi, br, rel_tol);
        const double c = ring * std::pow(rho, n - 1);
        out.perimeter = {c * I.value, c * I.error};
    }

    if (euclidean_volume) {
        out.volume = {unit_ball_volume(n) * std::pow(rho, n), 0.0};
        return out;
    }
    if (W.is_power()) {
        if (eps != 0.0)
            throw DomainError("power-weighted volume of an off-center ball is not supported; use the Euclidean volume");
        out.volume = ball_volume(W, rho, n);
        return out;
    }
    // The angular integral uses fixed Gauss-Legendre panels between the kink
    // angles. An adaptive rule here would be a non-smooth function of t at the
    // 1e-15 level and would stall the outer adaptive integral.
    double inner_err = 0.0;
    auto inner = [&](double t) {
        if (t == 0.0) return 0.0;
        const double a = rho * t;
        auto f = [&](double th) { return sin_pow(th) * W.value(dist(a, th)); };
        auto cuts = angle_breaks(a);
        cuts.insert(cuts.begin(), 0.0);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(pi);
        double hi_sum = 0.0, lo_sum = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const int pieces = std::max(1, static_cast<int>(std::ceil((cuts[k + 1] - cuts[k]) / (pi / 8))));
            for (int j = 0; j < pieces; ++j) {
                const double lo = cuts[k] + (cuts[k + 1] - cuts[k]) * j / pieces;
                const double hi = cuts[k] + (cuts[k + 1] - cuts[k]) * (j + 1) / pieces;
                hi_sum += gl_integral(f, lo, hi, 32);
                lo_sum += gl_integral(f, lo, hi, 16);
            }
        }
        const double tp = std::pow(t, n - 1);
        inner_err = std::max(inner_err, tp * (std::abs(hi_sum - lo_sum) + kRoundoff * std::abs(hi_sum)));
        return tp * hi_sum;
    };
    std::vector<double> tb;
    const double ae = std::abs(eps);
    for (double b : bps)
        for (double cand : {(b + ae) / rho, (b - ae) / rho, (ae - b) / rho})
            if (cand > 0.0 && cand < 1.0) tb.push_back(cand);
    const auto V = integrate_piecewise(inner, 0.0, 1.0, tb, rel_tol);
    const double c = ring * std::pow(rho, n);
    out.volume = {c * V.value, c * (V.error + inner_err)};
    return out;
}

BodyMeasures ellipsoid_measures(const RadialWeight& W, const Ellipsoid& E, int resolution, bool euclidean) {
    const int n = E.n();
    auto eval = [&](const SphereRule& rule, int order, double* pmag, double* vmag) {
        std::vector<double> pv(rule.size()), vv(rule.size());
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const Vec3& x = rule.nodes()[i];
            Vec3 y{0.0, 0.0, 0.0};
            for (int d = 0; d < n; ++d) y[static_cast<std::size_t>(d)] = E.axes[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
            pv[i] = W.value(norm(y)) * E.area_factor(x);
            vv[i] = layer_mass(W, n, 0.0, E.radial(x), euclidean, order);
        }
        return std::pair{sphere_sum(rule, pv, pmag), sphere_sum(rule, vv, vmag)};
    };
    const auto fine_rule = build_sphere_rule(n, resolution);
    const auto coarse_rule = build_sphere_rule(n, std::max(2, resolution / 2));
    double pmag = 0.0, vmag = 0.0;
    const auto [pf, vf] = eval(fine_rule, 48, &pmag, &vmag);
    const auto [pc, vc] = eval(coarse_rule, 48, nullptr, nullptr);
    const double vh = euclidean ? vf : eval(fine_rule, 24, nullptr, nullptr).second;
    return {{pf, std::abs(pf - pc) + kRoundoff * pmag},
            {vf, std::abs(vf - vc) + std::abs(vf - vh) + kRoundoff * vmag}};
}

MeasureValue symdiff_radial_graph(const RadialWeight& W, int n, double r,
                                  const std::function<double(const Vec3&)>& R, int resolution,
                                  bool euclidean) {
    if (n != 2 && n != 3) throw UnsupportedDimension("radial-graph symmetric difference needs n = 2 or 3");
    if (!(r > 0.0)) throw ArgumentError("reference radius must be positive");
    const double pi = std::numbers::pi;
    auto layer = [&](double rad, int order) { return std::abs(layer_mass(W, n, r, rad, euclidean, order)); };

    // Integral over [a, b] of weight(s) * |layer(R(point(s)))| where the sign of
    // R - r is constant on every panel; long panels are split for accuracy.
    auto panel_sum = [&](auto&& point, auto&& weight, const std::vector<double>& cuts, double max_len, int order) {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], b = cuts[k + 1];
            const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_len)));
            for (int j = 0; j < pieces; ++j) {
                const double lo = a + (b - a) * j / pieces, hi = a + (b - a) * (j + 1) / pieces;
                s += gl_integral([&](double th) { return weight(th) * layer(R(point(th)), 24); }, lo, hi, order);
            }
        }
        return s;
    };

    // Sign-change locations of g on the sampled grid, refined to roots.
    auto find_cuts = [&](auto&& g, double a, double b, int samples, bool periodic) {
        std::vector<double> cuts;
        const double h = (b - a) / samples;
        std::vector<double> gs(static_cast<std::size_t>(samples + 1));
        for (int j = 0; j <= samples; ++j) gs[static_cast<std::size_t>(j)] = (periodic && j == samples) ? gs[0] : g(a + j * h);
        for (int j = 0; j < samples; ++j) {
            const double g0 = gs[static_cast<std::size_t>(j)], g1 = gs[static_cast<std::size_t>(j + 1)];
            if (g0 == 0.0) {
                cuts.push_back(a + j * h);
            } else if (g0 * g1 < 0.0) {
                cuts.push_back(refine_root(g, a + j * h, a + (j + 1) * h));
            }
        }
        return cuts;
    };

    if (n == 2) {
        auto point = [](double th) { return Vec3{std::cos(th), std::sin(th), 0.0}; };
        auto one = [](double) { return 1.0; };
        auto g = [&](double th) { return R(point(th)) - r; };
        const int M = std::max(256, 4 * resolution);
        auto cuts = find_cuts(g, 0.0, 2.0 * pi, M, true);
        if (cuts.empty()) {
            // Smooth periodic integrand: trapezoid at M and M/2.
            auto trap = [&](int m) {
                double s = 0.0;
                for (int j = 0; j < m; ++j) s += layer(R(point(2.0 * pi * j / m)), 24);
                return s * 2.0 * pi / m;
            };
            const double a = trap(M), b = trap(M / 2);
            return {a, std::abs(a - b) + kRoundoff * std::abs(a)};
        }
        cuts.push_back(cuts.front() + 2.0 * pi);
        const double a = panel_sum(point, one, cuts, pi / 16.0, 32);
        const double b = panel_sum(point, one, cuts, pi / 16.0, 16);
        return {a, std::abs(a - b) + kRoundoff * std::abs(a)};
    }

    const int M = std::max(64, 2 * resolution);
    auto line = [&](double ph, int order) {
        auto point = [ph](double th) { return Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}; };
        auto wsin = [](double th) { return std::sin(th); };
        auto g = [&](double th) { return R(point(th)) - r; };
        std::vector<double> cuts{0.0};
        for (double c : find_cuts(g, 0.0, pi, M, false))
            if (c > 0.0) cuts.push_back(c);
        cuts.push_back(pi);
        return panel_sum(point, wsin, cuts, pi / 8.0, order);
    };
    // The azimuthal profile has square-root corners where a latitude line is
    // tangent to {R = r}, so it is integrated adaptively.
    std::vector<double> phi_cuts;
    for (int j = 1; j < 16; ++j) phi_cuts.push_back(2.0 * pi * j / 16);
    const auto I = integrate_piecewise([&](double ph) { return line(ph, 24); }, 0.0, 2.0 * pi, phi_cuts, 1e-11);
    double line_err = 0.0;
    for (int j = 0; j < 32; ++j) {
        const double ph = 2.0 * pi * (j + 0.5) / 32;
        line_err += std::abs(line(ph, 24) - line(ph, 12));
    }
    line_err *= 2.0 * pi / 32;
    return {I.value, I.error + line_err + kRoundoff * std::abs(I.value)};
}

MeasureValue symdiff_measure(const RadialWeight& W, const NearlySphericalSet& E, double r, int resolution,
                             bool euclidean) {
    auto R = [&](const Vec3& x) {
        const double s = 1.0 + synthesize_point(E.u, x).value;
        if (!(s > 0.0)) throw DegenerateShape("1 + u <= 0 on the boundary");
        return E.r * s;
    };
    return symdiff_radial_graph(W, E.n, r, R, resolution, euclidean);
}

MeasureValue symdiff_measure(const RadialWeight& W, const Ellipsoid& E, double r, int resolution, bool euclidean) {
    return symdiff_radial_graph(W, E.n(), r, [&](const Vec3& x) { return E.radial(x); }, resolution, euclidean);
}

MeasureValue symdiff_measure(const RadialWeight& W, const OffCenterBall& B, double r, bool euclidean) {
    if (!(std::abs(B.eps) < B.rho))
        throw UnsupportedGeometry("off-center ball with |eps| >= rho is not star-shaped about the origin");
    const int n = B.n;
    const double pi = std::numbers::pi;
    const double ring = (n - 1) * unit_ball_volume(n - 1);
    auto f = [&](double th) {
        const double s = n == 2 ? 1.0 : std::pow(std::sin(th), n - 2);
        return s * std::abs(layer_mass(W, n, r, B.radial(std::cos(th)), euclidean, 24));
    };
    // R(theta) is monotone in theta, so R = r has at most one root.
    auto g = [&](double th) { return B.radial(std::cos(th)) - r; };
    std::vector<double> cuts;
    if (g(0.0) * g(pi) < 0.0) cuts.push_back(refine_root(g, 0.0, pi));
    const auto I = integrate_piecewise(f, 0.0, pi, cuts, 1e-13);
    return {ring * I.value, ring * I.error};
}

double symdiff_smoothed(const RadialWeight& W, const NearlySphericalSet& E, const MeasureGrid& grid,
                        bool euclidean, double delta) {
    require_table(E, grid);
    const auto f = grid.table().synthesize(E.u);
    std::vector<double> v(f.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = 1.0 + f.values[i];
        if (!(s > 0.0)) throw DegenerateShape("1 + u <= 0 at sphere node " + std::to_string(i));
        const double L = layer_mass(W, E.n, E.r, E.r * s, euclidean, 16);
        v[i] = std::sqrt(L * L + delta * delta) - delta;
    }
    return sphere_sum(grid.rule(), v);
}

}  // namespace wiso
