#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "wiso/profile.hpp"

using namespace wiso;
using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

namespace {

const RadialWeight flat = RadialWeight::exp_convex(zero_profile());
const RadialWeight sq = RadialWeight::exp_convex(square_profile());

// Weighted area of B_rho(eps e1) in the plane for W = exp(|x|^2), integrated in
// polar coordinates about the centre.
double disk_mass_oracle(double eps, double rho) {
    auto inner = [&](double ph) {
        return gauss_kronrod<double, 61>::integrate(
            [&](double s) {
                const double x = eps + s * std::cos(ph), y = s * std::sin(ph);
                return s * std::exp(x * x + y * y);
            },
            0.0, rho, 10, 1e-14);
    };
    return gauss_kronrod<double, 61>::integrate(inner, 0.0, 2 * pi, 10, 1e-14);
}

}  // namespace

TEST_CASE("phi closed forms") {
    for (int n : {2, 3, 4}) {
        const Profile P(flat, n);
        for (double s : {0.3, 1.0, 2.5}) CHECK(P.phi(s) == doctest::Approx(unit_ball_volume(n) * std::pow(s, n)).epsilon(1e-14));
        CHECK(P.phi(0.0) == 0.0);
    }
    CHECK(std::abs(Profile(sq, 2).phi(1.0) - pi * (std::numbers::e - 1)) <= 1e-13);
    CHECK_THROWS_AS(Profile(sq, 2).phi(-1.0), ArgumentError);
    CHECK_THROWS_AS(Profile(RadialWeight::power(-4.0), 2), DomainError);
}

TEST_CASE("psi inverts phi") {
    for (int n : {2, 3}) {
        const Profile Z(flat, n);
        for (double t : {1e-6, 0.1, 1.0, 40.0})
            CHECK(Z.psi(t) == doctest::Approx(std::pow(t / unit_ball_volume(n), 1.0 / n)).epsilon(1e-13));
        for (const auto& W : {sq, RadialWeight::exp_convex(cosh_profile()), RadialWeight::exp_convex(make_flat_shoulder_profile(1.0))}) {
            const Profile P(W, n);
            for (int k = 1; k <= 60; ++k) {
                const double s = 0.05 * k;
                CHECK(std::abs(P.psi(P.phi(s)) - s) <= 1e-10 * s);
            }
        }
    }
    CHECK(Profile(sq, 2).psi(0.0) == 0.0);
    CHECK_THROWS_AS(Profile(sq, 2).psi(-1.0), ArgumentError);
}

TEST_CASE("psi derivative identity") {
    for (int n : {2, 3}) {
        const Profile P(sq, n);
        for (double t : {0.05, 0.5, 3.0, 20.0}) {
            const double h = 1e-4 * t;
            const double fd = (P.psi(t + h) - P.psi(t - h)) / (2 * h);
            CHECK(std::abs(fd - P.psi_prime(t)) <= 1e-6 * P.psi_prime(t));
        }
    }
}

TEST_CASE("profile inequality") {
    const Profile Z(flat, 3);
    std::vector<double> ts{0.01, 0.5, 2.0};
    const auto rz = check_profile_inequality(Z, ts);
    CHECK(rz.passed());
    CHECK(rz.scalar("min_slack") == doctest::Approx(3.0).epsilon(1e-12));

    const Profile P(sq, 2);
    std::vector<double> samples;
    const double top = P.phi(2.0);
    for (int i = 1; i <= 100; ++i) samples.push_back(top * i / 100.0);
    samples.push_back(1e-12);
    const auto rep = check_profile_inequality(P, samples);
    CHECK(rep.passed());
    CHECK(rep.scalar("min_slack") >= 1.0);
    CHECK(rep.table("samples")->rows.size() == 101u);
    std::vector<double> bad{0.0};
    CHECK_THROWS_AS(check_profile_inequality(P, bad), ArgumentError);
}

TEST_CASE("truncation radius") {
    const Profile P(flat, 2);
    CHECK(P.truncation_radius(1.0) == doctest::Approx(1.0 + 4.0 / std::sqrt(pi)));
}

TEST_CASE("rho(eps)") {
    CHECK(rho_of_eps(sq, 1.0, 2, 0.0) == 1.0);
    for (int n : {2, 3, 4})
        for (double eps : {0.05, 0.3}) CHECK(std::abs(rho_of_eps(flat, 0.8, n, eps) - 0.8) <= 1e-14);

    const auto sol = solve_rho(sq, 1.0, 2, 0.05);
    CHECK(std::abs(sol.relative_residual) < 1e-12);
    CHECK(sol.rho < 1.0);

    // Bisection against an independent planar quadrature.
    const double target = disk_mass_oracle(0.0, 1.0);
    double lo = 0.9, hi = 1.0;
    for (int i = 0; i < 45; ++i) {
        const double mid = 0.5 * (lo + hi);
        (disk_mass_oracle(0.05, mid) < target ? lo : hi) = mid;
    }
    CHECK(std::abs(sol.rho - 0.5 * (lo + hi)) <= 1e-11);

    // Reflection symmetry.
    CHECK(std::abs(rho_of_eps(sq, 1.0, 2, -0.05) - sol.rho) <= 1e-14);
}

TEST_CASE("rho derivatives at eps = 0") {
    // rho'(0) = 0 and rho''(0) = -w'(r)/n by the divergence theorem.
    const double h = 1e-3;
    for (int n : {2, 3}) {
        const double rp = rho_of_eps(sq, 1.0, n, h), rm = rho_of_eps(sq, 1.0, n, -h);
        CHECK(std::abs((rp - rm) / (2 * h)) <= 1e-6);
        auto second = [&](double step) {
            return (rho_of_eps(sq, 1.0, n, step) - 2.0 + rho_of_eps(sq, 1.0, n, -step)) / (step * step);
        };
        const double d1 = second(h), d2 = second(h / 2);
        const double rich = (4 * d2 - d1) / 3;
        CHECK(std::abs(rich - (-2.0 / n)) <= 1e-4 * (2.0 / n));
    }
}
