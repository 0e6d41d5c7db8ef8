#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "wiso/stability.hpp"

using namespace wiso;
using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;

namespace {

const RadialWeight flat = RadialWeight::exp_convex(zero_profile());
const RadialWeight sq = RadialWeight::exp_convex(square_profile());

template <class F>
double gk(F f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-15);
}

}  // namespace

TEST_CASE("taylor coefficients") {
    SUBCASE("w = 0") {
        for (int n : {2, 3, 5}) {
            const auto t = taylor_coefficients(zero_profile(), 1.3, n);
            CHECK(t.a == doctest::Approx(1.0 / n).epsilon(1e-14));
            CHECK(t.b == 0.0);
            CHECK(t.c == 0.0);
            CHECK(t.d == 0.0);
            CHECK(t.residual_first <= 1e-14);
            CHECK(t.residual_second <= 1e-14);
        }
    }
    SUBCASE("w = t^2 against closed form and direct quadrature") {
        for (double r : {0.5, 1.0, 2.0}) {
            const auto t = taylor_coefficients(square_profile(), r, 2);
            CHECK(t.a == doctest::Approx((std::exp(r * r) - 1) / (2 * r * r)).epsilon(1e-13));
            const double b = gk([&](double s) { return s * s * 2 * r * s * std::exp(r * r * s * s); }, 0, 1);
            const double c = gk([&](double s) { return s * s * s * 2 * std::exp(r * r * s * s); }, 0, 1);
            const double d = gk([&](double s) { return std::pow(s, 3) * 4 * r * r * s * s * std::exp(r * r * s * s); }, 0, 1);
            CHECK(t.b == doctest::Approx(b).epsilon(1e-13));
            CHECK(t.c == doctest::Approx(c).epsilon(1e-13));
            CHECK(t.d == doctest::Approx(d).epsilon(1e-13));
        }
    }
    SUBCASE("identities hold on the grid") {
        for (const auto& w : {square_profile(), cosh_profile(), make_flat_shoulder_profile(1.0)})
            for (double r : {0.5, 1.0, 2.0})
                for (int n : {2, 3}) {
                    const auto t = taylor_coefficients(w, r, n);
                    CHECK(t.residual_first < 1e-12);
                    CHECK(t.residual_second < 1e-12);
                }
    }
    CHECK_THROWS_AS(taylor_coefficients(square_profile(), 0.0, 2), ArgumentError);
    CHECK_THROWS_AS(taylor_coefficients(square_profile(), 1.0, 1), ArgumentError);
}

TEST_CASE("divergence identities") {
    // w = t^2, n = 2, r = 1: both sides are 2 pi (e - 1) and 2 pi.
    const auto d = divergence_identities(square_profile(), 1.0, 2);
    CHECK(d.lhs_first == doctest::Approx(2 * pi * (e - 1)).epsilon(1e-13));
    CHECK(d.rhs_first == doctest::Approx(2 * pi * (e - 1)).epsilon(1e-13));
    CHECK(d.lhs_second == doctest::Approx(2 * pi).epsilon(1e-13));
    CHECK(d.rhs_second == doctest::Approx(2 * pi).epsilon(1e-13));

    const auto z = divergence_identities(zero_profile(), 0.7, 3);
    CHECK(z.lhs_first == 0.0);
    CHECK(std::abs(z.rhs_second) <= 1e-14);

    for (const auto& w : {square_profile(), cosh_profile(), make_flat_shoulder_profile(1.0)})
        for (double r : {0.5, 1.0, 2.0})
            for (int n : {2, 3}) {
                const auto v = divergence_identities(w, r, n);
                CHECK(v.residual_first < 1e-12);
                CHECK(v.residual_second < 1e-12);
            }
}

TEST_CASE("second-order closed forms") {
    // rho''(0) = -w'(r)/n and the perimeter second derivative equals P w''(r)/n.
    for (int n : {2, 3}) {
        for (double r : {0.5, 1.0, 2.0}) {
            CHECK(rho_second_derivative(square_profile(), r, n).value == doctest::Approx(-2 * r / n).epsilon(1e-12));
            CHECK(rho_second_derivative(cosh_profile(), r, n).value ==
                  doctest::Approx(-std::sinh(r) / n).epsilon(1e-12));
            const double P = ball_perimeter(sq, r, n).value;
            CHECK(perimeter_second_derivative(square_profile(), r, n).value ==
                  doctest::Approx(2 * P / n).epsilon(1e-11));
        }
    }
    CHECK(perimeter_second_derivative(square_profile(), 1.0, 2).value == doctest::Approx(2 * pi * e).epsilon(1e-12));
    const auto shoulder = make_flat_shoulder_profile(1.0);
    CHECK(rho_second_derivative(shoulder, 1.0, 2).value == 0.0);
    CHECK(std::abs(perimeter_second_derivative(shoulder, 1.0, 2).value) <= 1e-14);
    CHECK(rho_second_derivative(zero_profile(), 1.0, 3).value == 0.0);
}

TEST_CASE("random directions") {
    const auto a = random_direction(3, 4, 7), b = random_direction(3, 4, 7), c = random_direction(3, 4, 8);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.at(0, 1) == 0.0);
    for (double v : a.values) CHECK(std::abs(v) <= 0.25);
    const auto hi = random_direction(2, 4, 1, 3);
    for (int k = 0; k < 3; ++k)
        for (int i = 1; i <= harmonic_multiplicity(2, k); ++i) CHECK(hi.at(k, i) == 0.0);
    CHECK_THROWS_AS(random_direction(2, 2, 1, 3), ArgumentError);
}

TEST_CASE("volume matching") {
    for (int n : {2, 3}) {
        const MeasureGrid grid(n, default_resolution(n), 4);
        auto dir = random_direction(n, 4, 3);
        dir *= 1.0 / w1inf_norm(dir, grid);
        CHECK(w1inf_norm(dir, grid) == doctest::Approx(1.0).epsilon(1e-14));

        const auto m = volume_matched_perturbation(sq, 1.0, dir, 9e-3, grid);
        CHECK(std::abs(m.relative_residual) <= 1e-12);
        const double vol = volume_nearly_spherical(sq, m.set, grid).value;
        CHECK(std::abs(vol / ball_volume(sq, 1.0, n).value - 1) <= 1e-12);

        // For w = 0 the correction is second order in the amplitude.
        const auto f1 = volume_matched_perturbation(flat, 1.0, dir, 8e-3, grid);
        const auto f2 = volume_matched_perturbation(flat, 1.0, dir, 4e-3, grid);
        CHECK(std::abs(f1.c0) <= 1e-3);
        CHECK(f2.c0 / f1.c0 == doctest::Approx(0.25).epsilon(0.01));
    }
    const MeasureGrid grid(2, 64, 4);
    CHECK_THROWS_AS(volume_matched_perturbation(sq, 1.0, random_direction(2, 4, 1), 20.0, grid), DegenerateShape);
    CHECK_THROWS_AS(volume_matched_perturbation(sq, 1.0, random_direction(3, 4, 1), 1e-3, grid), ArgumentError);
}

TEST_CASE("deficit reports") {
    const MeasureGrid grid(2, 64, 4);
    SUBCASE("reference ball") {
        const NearlySphericalSet ball{2, 1.0, HarmonicCoefficients::zeros(2, 4)};
        const auto s = fuglede_report(sq, ball, grid);
        CHECK(s.degenerate);
        CHECK(std::abs(s.deficit.value) <= 1e-12);
        CHECK(std::isnan(s.ratio_fuglede));
        CHECK(std::isnan(s.ratio_quant));
        const auto j = s.to_json();
        CHECK(j["ratio_quant"].is_null());
        CHECK(j["volume_matched"] == true);
    }
    SUBCASE("volume mismatch") {
        auto u = HarmonicCoefficients::zeros(2, 4);
        u.at(0, 1) = 0.01;
        CHECK_THROWS_AS(fuglede_report(sq, NearlySphericalSet{2, 1.0, u}, grid), VolumeMismatch);
    }
    SUBCASE("pure mode n = 2, w = 0") {
        // u = a cos(k theta) matched: deficit ~ pi a^2 (k^2 - 1) / 2 to leading order, so
        // the Fuglede ratio tends to (k^2 - 1) / (2 k^2).
        auto dir = HarmonicCoefficients::zeros(2, 4);
        dir.at(3, 1) = 1.0;
        const auto m = volume_matched_perturbation(flat, 1.0, dir, 1e-3, grid);
        const auto s = fuglede_report(flat, m.set, grid);
        CHECK(s.ratio_fuglede == doctest::Approx(8.0 / 18.0).epsilon(1e-2));
        CHECK(s.ratio_quant > 0.0);
        CHECK(s.symdiff.value > 0.0);
        const auto q = fuglede_report(flat, m.set, grid, 1e-10, false);
        CHECK(std::isnan(q.ratio_quant));
        CHECK(q.deficit.value == s.deficit.value);
    }
    SUBCASE("translated ball, w = 0") {
        const auto s = quantitative_ratio(flat, 1.0, OffCenterBall(2, 0.1, 1.0));
        CHECK(std::abs(s.deficit.value) <= 1e-12);
        CHECK(s.symdiff.value > 0.0);
        CHECK(std::abs(s.ratio_quant) <= 1e-10);
        CHECK_THROWS_AS(quantitative_ratio(flat, 1.0, OffCenterBall(2, 0.1, 1.1)), VolumeMismatch);
    }
}

TEST_CASE("fuglede sweep, small") {
    FugledeSweepOptions opt;
    opt.seeds = 4;
    const auto rep = fuglede_sweep(sq, 1.0, 2, opt);
    CHECK(rep.passed());
    CHECK(rep.table("perturbations")->rows.size() == 4u);
    CHECK(rep.scalar("min_ratio_fuglede") >= 1e-2);
    opt.seeds = 0;
    CHECK_THROWS_AS(fuglede_sweep(sq, 1.0, 2, opt), ArgumentError);
}

TEST_CASE("expansion checks") {
    const auto rep = expansion_check(square_profile(), 1.0, 2);
    CHECK(rep.passed());
    CHECK(rep.scalar("rho_second_fd") == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rep.scalar("perimeter_second_fd") == doctest::Approx(2 * pi * e).epsilon(1e-5));
    CHECK_THROWS_AS(degenerate_expansion_check(square_profile(), 1.0, 2), PreconditionError);
    CHECK_THROWS_AS(expansion_check(square_profile(), 1.0, 2, 2.0), ArgumentError);
}

TEST_CASE("translated-ball scan, strictly convex") {
    std::vector<double> eps{0.1, 0.03, 0.01};
    const auto rep = translated_ball_scan(square_profile(), 1.0, 2, eps);
    CHECK(rep.passed());
    CHECK(rep.scalar("decay_factor") < 2.0);
    std::vector<double> one{0.1};
    CHECK_THROWS_AS(translated_ball_scan(square_profile(), 1.0, 2, one), ArgumentError);
}

TEST_CASE("ellipsoid scan") {
    std::vector<double> ts{0.1, 0.05, 0.025};
    const auto rep = ellipsoid_sharpness_scan(sq, 1.0, 2, ts, 64);
    CHECK(rep.passed());
    CHECK(rep.scalar("band") < 1.2);
    CHECK(rep.table("halving")->rows.size() == 2u);
    std::vector<double> bad{1.5};
    CHECK_THROWS_AS(ellipsoid_sharpness_scan(sq, 1.0, 2, bad, 64), ArgumentError);
    CHECK_THROWS_AS(ellipsoid_sharpness_scan(sq, 1.0, 4, ts, 64), UnsupportedDimension);
}
