#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wiso/quadrature.hpp"

using namespace wiso;
constexpr double pi = std::numbers::pi;

namespace {

// Composite Simpson with one Richardson step; independent of the Gauss rules.
template <class F>
double simpson_richardson(F f, double a, double b, int panels) {
    auto simpson = [&](int m) {
        const double h = (b - a) / m;
        double s = f(a) + f(b);
        for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
        return s * h / 3.0;
    };
    const double s1 = simpson(panels), s2 = simpson(2 * panels);
    return s2 + (s2 - s1) / 15.0;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int order : {1, 2, 5, 16, 48}) {
        const auto& gl = gauss_legendre(order);
        double wsum = 0.0;
        for (double w : gl.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        for (int deg = 0; deg <= 2 * order - 1; deg += 2) {
            double s = 0.0;
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], deg);
            CHECK(s == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("sphere rule invariants") {
    for (auto [n, res] : {std::pair{2, 64}, std::pair{2, 256}, std::pair{3, 16}, std::pair{3, 64}}) {
        const auto rule = build_sphere_rule(n, res);
        double wsum = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            CHECK(std::abs(norm(rule.nodes()[i]) - 1.0) <= 1e-14);
            CHECK(rule.weights()[i] > 0.0);
            wsum += rule.weights()[i];
        }
        CHECK(std::abs(wsum - unit_sphere_area(n)) / unit_sphere_area(n) <= 1e-10);
    }
    CHECK(build_sphere_rule(3, 64).size() == 64u * 128u);
}

TEST_CASE("sphere integrals with closed forms") {
    const auto c2 = build_sphere_rule(2, 64);
    CHECK(std::abs(integrate_sphere(c2, [](const Vec3&) { return 1.0; }) - 2.0 * pi) <= 1e-12);

    const auto s2 = build_sphere_rule(3, 32);
    CHECK(std::abs(integrate_sphere(s2, [](const Vec3& x) { return x[2] * x[2]; }) - 4.0 * pi / 3.0) <= 1e-10);
    CHECK(std::abs(integrate_sphere(s2, [](const Vec3& x) { return x[0]; })) <= 1e-12);

    const double ex = integrate_sphere(s2, [](const Vec3& x) { return std::exp(x[0]); });
    const double ex_fine = integrate_sphere(build_sphere_rule(3, 64), [](const Vec3& x) { return std::exp(x[0]); });
    CHECK(std::abs(ex - 4.0 * pi * std::sinh(1.0)) <= 1e-11);
    CHECK(std::abs(ex - ex_fine) <= 1e-11);
    CHECK(ex == doctest::Approx(14.7680).epsilon(1e-5));
}

TEST_CASE("circle rule is exact for trigonometric polynomials below half the resolution") {
    const int res = 32;
    const auto rule = build_sphere_rule(2, res);
    for (int k = 1; k < res / 2; ++k) {
        auto ck = [k](const Vec3& x) { return std::cos(k * std::atan2(x[1], x[0])); };
        auto ck2 = [k](const Vec3& x) {
            const double c = std::cos(k * std::atan2(x[1], x[0]));
            return c * c;
        };
        CHECK(std::abs(integrate_sphere(rule, ck)) <= 1e-13);
        CHECK(std::abs(integrate_sphere(rule, ck2) - pi) <= 1e-13);
    }
}

TEST_CASE("sphere rule errors") {
    CHECK_THROWS_AS(build_sphere_rule(4, 16), UnsupportedDimension);
    CHECK_THROWS_AS(build_sphere_rule(1, 16), ArgumentError);
    const auto rule = build_sphere_rule(2, 8);
    std::vector<double> v(rule.size(), 1.0);
    v[5] = std::numeric_limits<double>::quiet_NaN();
    try {
        integrate_sphere(rule, v);
        FAIL("expected IntegrandError");
    } catch (const IntegrandError& e) {
        CHECK(std::string(e.what()).find("node 5") != std::string::npos);
    }
    v[5] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(integrate_sphere(rule, v), IntegrandError);
}

TEST_CASE("doubling the resolution stays within the reported error") {
    auto f2 = [](const Vec3& x) { return std::exp(std::sin(3.0 * x[0]) + x[1]); };
    auto f3 = [](const Vec3& x) { return 1.0 / (1.2 + x[0] * x[1] + 0.5 * x[2]); };
    for (int res : {16, 32, 64}) {
        const auto e = integrate_sphere_estimated(2, res, f2);
        const double finer = integrate_sphere(build_sphere_rule(2, 2 * res), f2);
        CHECK(std::abs(finer - e.value) <= e.error);
    }
    for (int res : {8, 16, 32}) {
        const auto e = integrate_sphere_estimated(3, res, f3);
        const double finer = integrate_sphere(build_sphere_rule(3, 2 * res), f3);
        CHECK(std::abs(finer - e.value) <= e.error);
    }
}

TEST_CASE("radial rules") {
    const auto r = build_radial_rule(0.0, 1.0, 8);
    CHECK(r.apply([](double t) { return t; }) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(r.apply([](double t) { return std::pow(t, 15); }) - 1.0 / 16.0) <= 1e-15);
    const auto r24 = build_radial_rule(0.0, 1.0, 24);
    CHECK(std::abs(r24.apply([](double t) { return t * std::exp(t * t); }) - (std::numbers::e - 1.0) / 2.0) <= 1e-14);

    // t^{n-1} e^{w(rt)} with n = 2, w = t^2, r = 1 against a Richardson-refined oracle.
    auto f = [](double t) { return t * std::exp(t * t); };
    const double oracle = simpson_richardson(f, 0.0, 1.0, 2000);
    CHECK(std::abs(integrate_radial(r24, f).value - oracle) <= 1e-12);
    CHECK(std::abs(integrate_adaptive(f, 0.0, 1.0).value - oracle) <= 1e-12);

    const auto ar = build_radial_rule(0.0, 3.0, 15, true);
    const auto big = integrate_radial(ar, [](double t) { return std::exp(std::cosh(t) - 1.0); });
    const double big_oracle = simpson_richardson([](double t) { return std::exp(std::cosh(t) - 1.0); }, 0.0, 3.0, 20000);
    CHECK(std::abs(big.value - big_oracle) / big_oracle <= 1e-12);
    CHECK(big.error >= 0.0);

    CHECK_THROWS_AS(build_radial_rule(1.0, 1.0, 4), ArgumentError);
    CHECK_THROWS_AS(build_radial_rule(2.0, 1.0, 4), ArgumentError);
    CHECK_THROWS_AS(build_radial_rule(0.0, 1.0, 1), ArgumentError);
}
