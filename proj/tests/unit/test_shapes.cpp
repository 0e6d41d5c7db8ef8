#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "wiso/shapes.hpp"

using namespace wiso;
using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

TEST_CASE("surface elements of simple radial graphs") {
    const auto rule = build_sphere_rule(2, 64);
    auto E = NearlySphericalSet::ball(2, 1.0, 2);
    for (const auto& el : surface_elements(E, rule)) {
        CHECK(el.jacobian == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(el.radius == 1.0);
    }

    // Constant u: rescaled sphere.
    for (int n : {2, 3}) {
        const auto rl = build_sphere_rule(n, 16);
        auto F = NearlySphericalSet::ball(n, 1.5, 1);
        const double c = 0.2;
        F.u.at(0, 1) = c * std::sqrt(unit_sphere_area(n));
        double per = 0.0;
        const auto el = surface_elements(F, rl);
        for (std::size_t i = 0; i < el.size(); ++i) {
            CHECK(el[i].jacobian == doctest::Approx(std::pow(1.5 * (1 + c), n - 1)).epsilon(1e-13));
            per += rl.weights()[i] * el[i].jacobian;
        }
        CHECK(per == doctest::Approx(unit_sphere_area(n) * std::pow(1.5 * (1 + c), n - 1)).epsilon(1e-13));
    }
}

TEST_CASE("Euclidean perimeter of a perturbed circle matches the polar arclength") {
    auto E = NearlySphericalSet::ball(2, 1.0, 2);
    E.u.at(2, 1) = 0.05;
    const double a = 0.05 / std::sqrt(pi);
    auto integrand = [a](double th) {
        const double rho = 1.0 + a * std::cos(2 * th), drho = -2.0 * a * std::sin(2 * th);
        return std::sqrt(rho * rho + drho * drho);
    };
    const double oracle = gauss_kronrod<double, 61>::integrate(integrand, 0.0, 2 * pi, 15, 1e-15);
    const auto rule = build_sphere_rule(2, 256);
    double per = 0.0;
    const auto el = surface_elements(E, rule);
    for (std::size_t i = 0; i < el.size(); ++i) per += rule.weights()[i] * el[i].jacobian;
    CHECK(std::abs(per - oracle) <= 1e-10);
}

TEST_CASE("surface elements reject folded shapes") {
    auto E = NearlySphericalSet::ball(2, 1.0, 1);
    E.u.at(1, 1) = 3.0;  // 1 + u < 0 near theta = pi
    CHECK_THROWS_AS(surface_elements(E, build_sphere_rule(2, 32)), DegenerateShape);
}

TEST_CASE("sampled W^{1,inf} norms") {
    const auto rule = build_sphere_rule(2, 64);
    auto E = NearlySphericalSet::ball(2, 1.0, 1);
    auto z = sample_w1inf(E, rule);
    CHECK(z.sup_u == 0.0);
    CHECK(z.sup_grad_u == 0.0);
    E.u.at(0, 1) = 0.3;
    z = sample_w1inf(E, rule);
    CHECK(z.sup_u == doctest::Approx(0.3 / std::sqrt(2 * pi)));
    CHECK(z.sup_grad_u <= 1e-15);
    E.u.at(0, 1) = 0.0;
    E.u.at(1, 1) = 0.1;
    z = sample_w1inf(E, rule);
    CHECK(z.sup_u == doctest::Approx(0.1 / std::sqrt(pi)).epsilon(1e-14));
    CHECK(z.sup_grad_u == doctest::Approx(0.1 / std::sqrt(pi)).epsilon(1e-14));
}

TEST_CASE("off-center ball radial function") {
    const OffCenterBall B(2, 0.1, 1.0);
    CHECK(B.radial(1.0) == doctest::Approx(1.1));
    CHECK(B.radial(-1.0) == doctest::Approx(0.9));
    for (double th = 0.0; th < pi; th += 0.1) {
        const double R = B.radial(std::cos(th));
        const double dx = R * std::cos(th) - 0.1, dy = R * std::sin(th);
        CHECK(std::hypot(dx, dy) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(OffCenterBall(2, 1.5, 1.0).radial(0.0), UnsupportedGeometry);
    CHECK_THROWS_AS(OffCenterBall(2, 0.0, 0.0), ArgumentError);
}

TEST_CASE("ellipsoid radial function and area factor") {
    const Ellipsoid E({2.0, 0.5});
    CHECK(E.radial({1.0, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(E.radial({0.0, 1.0, 0.0}) == doctest::Approx(0.5));
    const Ellipsoid ball({1.3, 1.3, 1.3});
    CHECK(ball.radial({0.6, 0.0, 0.8}) == doctest::Approx(1.3));
    CHECK(ball.area_factor({0.6, 0.0, 0.8}) == doctest::Approx(1.3 * 1.3));
    CHECK_THROWS_AS(Ellipsoid({1.0, -1.0}), ArgumentError);
    CHECK_THROWS_AS(Ellipsoid({1.0, 1.0, 1.0, 1.0}), UnsupportedDimension);
}

TEST_CASE("JSON round trips") {
    auto E = NearlySphericalSet::ball(3, 0.7, 2);
    E.u.at(2, 3) = -0.01;
    const auto E2 = NearlySphericalSet::from_json(E.to_json());
    CHECK(E2.r == 0.7);
    CHECK(E2.u.values == E.u.values);
    const auto B = OffCenterBall::from_json(OffCenterBall(2, 0.05, 0.99).to_json());
    CHECK(B.eps == 0.05);
    CHECK(B.rho == 0.99);
    CHECK(Ellipsoid::from_json(Ellipsoid({1.0, 2.0}).to_json()).axes == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(Ellipsoid::from_json(B.to_json()), ArgumentError);
}

TEST_CASE("counterexample construction") {
    const int n = 2;
    const double p = -6.0, alpha = 8.0, r = 1e-3;
    const auto U = build_counterexample(n, p, alpha, r, 200, 7);
    REQUIRE(U.balls.size() == 200u);
    CHECK(U.separation_holds);
    double vol = 0.0;
    for (std::size_t i = 0; i < U.balls.size(); ++i) {
        const auto& b = U.balls[i];
        CHECK(b.radius == doctest::Approx(r * std::pow(2.0, -double(i) / n)).epsilon(1e-15));
        CHECK(std::pow(norm(b.center), alpha) > std::pow(2.0, alpha) * b.radius);
        CHECK(norm(b.center) < 1.0);
        vol += unit_ball_volume(n) * std::pow(b.radius, n);
        // Sampled boundary points stay outside B_{r_i^{1/alpha}}.
        double closest = 1e300;
        for (int k = 0; k < 64; ++k) {
            const double t = 2 * pi * k / 64;
            const Vec3 x{b.center[0] + b.radius * std::cos(t), b.center[1] + b.radius * std::sin(t), 0.0};
            closest = std::min(closest, norm(x));
        }
        CHECK(closest >= std::pow(b.radius, 1.0 / alpha));
    }
    CHECK(vol + U.volume_tail == doctest::Approx(2.0 * unit_ball_volume(n) * r * r).epsilon(1e-12));
    CHECK(vol + U.volume_tail <= 2.0 * unit_ball_volume(n) * r * r * (1 + 1e-12));

    // Determinism.
    const auto V = build_counterexample(n, p, alpha, r, 200, 7);
    CHECK(V.chosen == U.chosen);
    CHECK(V.to_json().dump() == U.to_json().dump());
    const auto W = build_counterexample(n, p, alpha, r, 200, 8);
    CHECK(W.chosen != U.chosen);

    // Perimeter tail is the geometric remainder of the bound series.
    const double beta = n - 1 + p / alpha;
    double tail = 0.0;
    for (int i = 200; i < 20000; ++i) tail += n * unit_ball_volume(n) * std::pow(r * std::pow(2.0, -double(i) / n), beta);
    CHECK(U.perimeter_tail == doctest::Approx(tail).epsilon(1e-6));
}

TEST_CASE("counterexample argument checks") {
    CHECK_THROWS_AS(build_counterexample(2, -6.0, 5.0, 1e-3, 10, 1), ArgumentError);   // alpha <= 6
    CHECK_THROWS_AS(build_counterexample(2, -6.0, 8.0, 0.01, 10, 1), ArgumentError);   // r >= 2^-8
    CHECK_THROWS_AS(build_counterexample(2, -0.5, 8.0, 1e-3, 10, 1), ArgumentError);   // p >= 1 - n
    CHECK_THROWS_AS(build_counterexample(2, -6.0, 8.0, 1e-3, 0, 1), ArgumentError);
    CHECK_THROWS_AS(build_counterexample(2, -6.0, 8.0, 1e-3, 50, 1, 10), PoolExhausted);
}

TEST_CASE("unit ball sampler stays inside and is reproducible") {
    UnitBallSampler a(3, 42), b(3, 42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next();
        CHECK(norm(x) < 1.0);
        CHECK(x == b.next());
    }
}
