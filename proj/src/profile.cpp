#include "wiso/profile.hpp"

#include <algorithm>
#include <cmath>

namespace wiso {

namespace {

// Bisection until the bracket is 1e-3 relative, then Newton steps that fall
// back to bisection whenever they leave the bracket.
template <class F, class DF>
double bracketed_newton(F&& f, DF&& df, double lo, double hi, int* iterations) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw SolverError("root is not bracketed");
    int it = 0;
    while (hi - lo > 1e-3 * std::abs(hi) && it < 200) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        ++it;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int k = 0; k < 60; ++k, ++it) {
        const double fx = f(x);
        if (fx == 0.0) break;
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        double next = x - fx / df(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 4e-16 * std::abs(x)) break;
    }
    if (iterations) *iterations = it;
    return x;
}

}  // namespace

Profile::Profile(RadialWeight W, int n) : W_(std::move(W)), n_(n) {
    if (n < 2) throw ArgumentError("profile needs n >= 2");
    if (W_.is_power() && !(W_.exponent() > -n))
        throw DomainError("profile of t^p is infinite for p <= -n");
    for (int k = 0; k <= 6; ++k) {
        const double s = std::ldexp(1.0, k) / 16.0;
        s_table_.push_back(s);
        phi_table_.push_back(phi(s));
    }
}

double Profile::phi(double s) const {
    if (!(s >= 0.0)) throw ArgumentError("phi needs s >= 0");
    return ball_volume(W_, s, n_).value;
}

double Profile::phi_prime(double s) const {
    if (s == 0.0) return 0.0;
    return unit_sphere_area(n_) * std::pow(s, n_ - 1) * W_.value(s);
}

double Profile::psi(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("psi needs a finite t >= 0");
    if (t == 0.0) return 0.0;
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < s_table_.size(); ++k) {
        if (phi_table_[k] >= t) {
            hi = s_table_[k];
            lo = k == 0 ? 0.0 : s_table_[k - 1];
            break;
        }
    }
    if (hi == 0.0) {
        lo = s_table_.back();
        hi = 2.0 * lo;
        while (phi(hi) < t) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e6)
                throw SolverError("psi: no bracket for t = " + format_short(t) + " below s = 1e6");
        }
    }
    // Near s = 0 the bisection phase would stall on an absolute scale.
    if (lo == 0.0) {
        lo = hi;
        while (lo > 1e-300 && phi(lo) >= t) lo *= 0.5;
    }
    return bracketed_newton([&](double s) { return phi(s) - t; }, [&](double s) { return phi_prime(s); }, lo,
                            hi, nullptr);
}

double Profile::psi_prime(double t) const {
    const double s = psi(t);
    return 1.0 / phi_prime(s);
}

ExperimentReport check_profile_inequality(const Profile& P, std::span<const double> t_samples) {
    ExperimentReport rep("profile-inequality");
    auto& tab = rep.add_table("samples", {"t", "psi", "rhs", "slack"});
    const int n = P.dimension();
    double min_slack = std::numeric_limits<double>::infinity();
    bool all = true;
    for (double t : t_samples) {
        if (!(t > 0.0)) throw ArgumentError("profile inequality samples must be positive");
        const double s = P.psi(t);
        const double rhs = unit_sphere_area(n) * std::pow(s, n) * P.weight().value(s);
        const double slack = rhs / t;
        min_slack = std::min(min_slack, slack);
        all = all && t <= rhs;
        tab.add_row({t, s, rhs, slack});
    }
    rep.add_scalar("min_slack", min_slack);
    rep.add_scalar("samples", static_cast<double>(t_samples.size()));
    rep.add_verdict("profile_inequality", all, "t <= n omega_n Psi^n W(Psi) at every sample");
    return rep;
}

RhoSolution solve_rho(const RadialWeight& W, double r, int n, double eps) {
    if (!(r > 0.0)) throw ArgumentError("rho(eps) needs r > 0");
    if (eps == 0.0) return {r, 0.0, 0};
    const double target = ball_volume(W, r, n).value;
    auto vol = [&](double rho) { return offcenter_ball_measures(W, OffCenterBall(n, eps, rho)).volume.value; };
    auto per = [&](double rho) { return offcenter_ball_measures(W, OffCenterBall(n, eps, rho)).perimeter.value; };
    double lo = 0.5 * r, hi = 2.0 * r;
    int expansions = 0;
    while (vol(lo) > target) {
        lo *= 0.5;
        if (++expansions > 8) throw SolverError("rho(eps): volume at rho = " + format_short(lo) + " still too large");
    }
    while (vol(hi) < target) {
        hi *= 2.0;
        if (++expansions > 8) throw SolverError("rho(eps): volume at rho = " + format_short(hi) + " still too small");
    }
    RhoSolution sol;
    sol.rho = bracketed_newton([&](double rho) { return vol(rho) - target; }, per, lo, hi, &sol.iterations);
    sol.relative_residual = (vol(sol.rho) - target) / target;
    return sol;
}

}  // namespace wiso
