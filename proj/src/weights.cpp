#include "wiso/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wiso/core.hpp"

namespace wiso {

ConvexProfile zero_profile() {
    auto zero = [](double) { return 0.0; };
    return {"zero", {}, zero, zero, zero, zero, Smoothness::C3, {}};
}

ConvexProfile square_profile() {
    return {"square",
            {},
            [](double t) { return t * t; },
            [](double t) { return 2.0 * t; },
            [](double) { return 2.0; },
            [](double) { return 0.0; },
            Smoothness::C3,
            {}};
}

ConvexProfile cosh_profile() {
    return {"cosh",
            {},
            [](double t) { return std::cosh(t) - 1.0; },
            [](double t) { return std::sinh(t); },
            [](double t) { return std::cosh(t); },
            [](double t) { return std::sinh(t); },
            Smoothness::C3,
            {}};
}

ConvexProfile make_flat_shoulder_profile(double r0) {
    if (!(r0 > 0.0)) throw ArgumentError("flat-shoulder profile needs r0 > 0");
    // s = |t| - r0 beyond the shoulder, zero inside it.
    auto excess = [r0](double t) { return std::max(std::abs(t) - r0, 0.0); };
    auto sgn = [](double t) { return t < 0.0 ? -1.0 : 1.0; };
    return {"flat-shoulder",
            {r0},
            [excess](double t) { return std::pow(excess(t), 4); },
            [excess, sgn](double t) { return 4.0 * std::pow(excess(t), 3) * sgn(t); },
            [excess](double t) { return 12.0 * excess(t) * excess(t); },
            [excess, sgn](double t) { return 24.0 * excess(t) * sgn(t); },
            Smoothness::C3,
            {r0}};
}

ConvexProfile make_profile(const std::string& name, const std::vector<double>& params) {
    if (name == "zero") return zero_profile();
    if (name == "square") return square_profile();
    if (name == "cosh") return cosh_profile();
    if (name == "flat-shoulder") {
        if (params.size() != 1)
            throw ArgumentError("flat-shoulder profile takes exactly one parameter r0");
        return make_flat_shoulder_profile(params[0]);
    }
    throw ArgumentError("unknown profile '" + name + "' (expected zero, square, cosh, flat-shoulder)");
}

RadialWeight RadialWeight::exp_convex(ConvexProfile profile) {
    if (!profile.w || !profile.dw || !profile.d2w)
        throw ArgumentError("profile '" + profile.name + "' is missing evaluators");
    return RadialWeight(std::move(profile));
}

RadialWeight RadialWeight::power(double exponent) {
    if (!std::isfinite(exponent)) throw ArgumentError("power weight exponent must be finite");
    return RadialWeight(exponent);
}

double RadialWeight::exponent() const {
    if (const double* p = std::get_if<double>(&kind_)) return *p;
    throw ArgumentError("exp-convex weight has no exponent");
}

double RadialWeight::value(double t) const {
    if (const double* p = std::get_if<double>(&kind_)) {
        if (!(t > 0.0)) throw DomainError("power weight t^p needs t > 0, got t = " + std::to_string(t));
        return std::pow(t, *p);
    }
    return std::exp(std::get<ConvexProfile>(kind_).w(t));
}

double RadialWeight::derivative(double t) const { return value(t) * log_derivative(t); }

double RadialWeight::log_derivative(double t) const {
    if (const double* p = std::get_if<double>(&kind_)) {
        if (!(t > 0.0)) throw DomainError("power weight t^p needs t > 0");
        return *p / t;
    }
    return std::get<ConvexProfile>(kind_).dw(t);
}

std::string RadialWeight::describe() const {
    if (const double* p = std::get_if<double>(&kind_)) return "power(" + format_short(*p) + ")";
    const auto& prof = std::get<ConvexProfile>(kind_);
    std::string s = "exp(" + prof.name;
    for (double v : prof.params) s += "," + format_short(v);
    return s + ")";
}

const std::vector<double>& RadialWeight::breakpoints() const {
    static const std::vector<double> none;
    if (const auto* prof = profile()) return prof->breakpoints;
    return none;
}

double eval_weight(const RadialWeight& weight, double t) {
    if (t < 0.0) throw DomainError("radial weight evaluated at negative radius");
    return weight.value(t);
}

std::vector<double> symmetric_grid(double half_width, int points) {
    if (points < 2 || !(half_width > 0.0)) throw ArgumentError("symmetric_grid needs points >= 2 and half_width > 0");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        // Mirror-exact construction: g[i] = -g[points-1-i].
        const int j = points - 1 - i;
        const double x = half_width * (static_cast<double>(i - j) / (points - 1));
        g[static_cast<std::size_t>(i)] = x;
    }
    return g;
}

ExperimentReport check_admissible(const ConvexProfile& w, std::span<const double> grid,
                                  const AdmissibilityTolerances& tol) {
    if (grid.empty()) throw ArgumentError("check_admissible: empty grid");
    if (grid.size() < 100)
        throw ArgumentError("check_admissible: grid needs at least 100 points, got " +
                            std::to_string(grid.size()));
    const std::size_t m = grid.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double a = grid[i], b = grid[m - 1 - i];
        if (std::abs(a + b) > 1e-12 * std::max(1.0, std::abs(a)))
            throw ArgumentError("check_admissible: grid is not symmetric about 0");
    }

    double even_res = 0.0;
    double min_d2 = std::numeric_limits<double>::infinity();
    double fd1 = 0.0, fd2 = 0.0, fd2_from_w = 0.0;
    const double h = tol.fd_step;
    for (double t : grid) {
        const double wt = w.w(t);
        even_res = std::max(even_res, std::abs(wt - w.w(-t)) / std::max(1.0, std::abs(wt)));
        const double d1 = w.dw(t), d2 = w.d2w(t);
        min_d2 = std::min(min_d2, d2);
        const double c1 = (w.w(t + h) - w.w(t - h)) / (2.0 * h);
        const double c2 = (w.dw(t + h) - w.dw(t - h)) / (2.0 * h);
        const double s2 = (w.w(t + h) - 2.0 * wt + w.w(t - h)) / (h * h);
        fd1 = std::max(fd1, std::abs(c1 - d1) / std::max(1.0, std::abs(d1)));
        fd2 = std::max(fd2, std::abs(c2 - d2) / std::max(1.0, std::abs(d2)));
        fd2_from_w = std::max(fd2_from_w, std::abs(s2 - d2) / std::max(1.0, std::abs(d2)));
    }
    const double fd_mismatch = std::max({fd1, fd2, fd2_from_w});
    const double convex_res = std::max(0.0, -min_d2);

    ExperimentReport rep("weight-audit");
    rep.add_scalar("grid_points", static_cast<double>(m));
    rep.add_scalar("evenness_residual", even_res);
    rep.add_scalar("min_w2", min_d2);
    rep.add_scalar("convexity_residual", convex_res);
    rep.add_scalar("fd_mismatch_w1", fd1);
    rep.add_scalar("fd_mismatch_w2", fd2);
    rep.add_scalar("fd_mismatch_w2_from_w", fd2_from_w);
    rep.add_scalar("fd_mismatch", fd_mismatch);
    rep.add_verdict("even", even_res <= tol.evenness, "max |w(t)-w(-t)| = " + format_short(even_res));
    rep.add_verdict("convex", min_d2 >= -tol.convex, "min w'' = " + format_short(min_d2));
    rep.add_verdict("derivatives_consistent", fd_mismatch <= tol.fd,
                    "max finite-difference mismatch = " + format_short(fd_mismatch));
    return rep;
}

}  // namespace wiso
