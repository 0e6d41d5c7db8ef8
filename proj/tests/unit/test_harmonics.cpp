#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wiso/harmonics.hpp"

using namespace wiso;
constexpr double pi = std::numbers::pi;

namespace {

Vec3 random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), n == 3 ? g(rng) : 0.0};
    const double r = norm(v);
    return {v[0] / r, v[1] / r, v[2] / r};
}

HarmonicCoefficients random_coefficients(std::mt19937_64& rng, int n, int K) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto c = HarmonicCoefficients::zeros(n, K);
    for (double& v : c.values) v = u(rng);
    return c;
}

// Move along the great circle through x in tangent direction e.
Vec3 geodesic(const Vec3& x, const Vec3& e, double h) {
    return {std::cos(h) * x[0] + std::sin(h) * e[0], std::cos(h) * x[1] + std::sin(h) * e[1],
            std::cos(h) * x[2] + std::sin(h) * e[2]};
}

}  // namespace

TEST_CASE("basis values at simple points") {
    CHECK(basis_eval(2, 0, 1, {1.0, 0.0, 0.0}) == doctest::Approx(1.0 / std::sqrt(2.0 * pi)));
    CHECK(basis_eval(2, 1, 1, {1.0, 0.0, 0.0}) == doctest::Approx(1.0 / std::sqrt(pi)));
    CHECK(basis_eval(3, 0, 1, {0.0, 0.0, 1.0}) == doctest::Approx(1.0 / std::sqrt(4.0 * pi)));
    // Zonal degree 1 is sqrt(3 / 4pi) z.
    CHECK(basis_eval(3, 1, 1, {0.0, 0.0, 1.0}) == doctest::Approx(std::sqrt(3.0 / (4.0 * pi))));
    CHECK(basis_eval(3, 1, 2, {1.0, 0.0, 0.0}) == doctest::Approx(std::sqrt(3.0 / (4.0 * pi))));
    CHECK(basis_eval(3, 1, 3, {0.0, 1.0, 0.0}) == doctest::Approx(std::sqrt(3.0 / (4.0 * pi))));
    const double th = 0.7;
    CHECK(basis_eval(2, 3, 2, {std::cos(th), std::sin(th), 0.0}) ==
          doctest::Approx(std::sin(3 * th) / std::sqrt(pi)).epsilon(1e-14));
}

TEST_CASE("index layout and errors") {
    CHECK(harmonic_index(2, 0, 1) == 0u);
    CHECK(harmonic_index(2, 3, 1) == 5u);
    CHECK(harmonic_index(3, 2, 1) == 4u);
    CHECK(harmonic_count(3, 4) == 25u);
    CHECK(harmonic_count(2, 4) == 9u);
    CHECK_THROWS_AS(harmonic_index(2, 0, 2), ArgumentError);
    CHECK_THROWS_AS(harmonic_index(3, 1, 4), ArgumentError);
    CHECK_THROWS_AS(harmonic_count(4, 2), UnsupportedDimension);
    CHECK_THROWS_AS(basis_eval(4, 0, 1, {1.0, 0.0, 0.0}), UnsupportedDimension);
    auto c = HarmonicCoefficients::zeros(3, 2);
    for (std::size_t j = 0; j < c.size(); ++j) CHECK(c.degree_of(j) == static_cast<int>(std::sqrt(double(j))));
}

TEST_CASE("Gram matrix is the identity") {
    for (auto [n, K, res] : {std::tuple{2, 8, 64}, std::tuple{3, 8, 32}}) {
        const auto rule = build_sphere_rule(n, res);
        const BasisTable table(rule, K);
        const std::size_t m = table.basis_size();
        double worst = 0.0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a; b < m; ++b) {
                double s = 0.0;
                for (std::size_t p = 0; p < rule.size(); ++p)
                    s += rule.weights()[p] * table.value(p, a) * table.value(p, b);
                worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
            }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("Laplace-Beltrami eigenvalue via gradient energy") {
    for (auto [n, K, res] : {std::tuple{2, 6, 64}, std::tuple{3, 6, 32}}) {
        const auto rule = build_sphere_rule(n, res);
        const BasisTable table(rule, K);
        for (std::size_t j = 0; j < table.basis_size(); ++j) {
            double e = 0.0;
            for (std::size_t p = 0; p < rule.size(); ++p) e += rule.weights()[p] * dot(table.gradient(p, j), table.gradient(p, j));
            const int k = HarmonicCoefficients::zeros(n, K).degree_of(j);
            CHECK(std::abs(e - harmonic_eigenvalue(n, k)) <= 1e-9 * (1.0 + harmonic_eigenvalue(n, k)));
        }
    }
}

TEST_CASE("analyze inverts synthesize and Parseval holds") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = trial % 2 ? 3 : 2;
        const int K = 2 + trial;
        const auto rule = build_sphere_rule(n, std::max(4 * K, 8));
        const auto c = random_coefficients(rng, n, K);
        const auto f = synthesize(c, rule);
        const auto back = analyze(rule, f.values, K);
        double worst = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) worst = std::max(worst, std::abs(back.values[j] - c.values[j]));
        CHECK(worst <= 1e-12);

        double l2 = 0.0, g2 = 0.0;
        for (std::size_t p = 0; p < rule.size(); ++p) {
            l2 += rule.weights()[p] * f.values[p] * f.values[p];
            g2 += rule.weights()[p] * dot(f.gradients[p], f.gradients[p]);
        }
        const auto s = sobolev_norms(c);
        CHECK(std::abs(l2 - s.l2_sq) <= 1e-10 * s.l2_sq);
        CHECK(std::abs(g2 - s.grad_sq) <= 1e-10 * s.grad_sq);
    }
    const auto coarse = build_sphere_rule(3, 8);
    std::vector<double> samples(coarse.size(), 1.0);
    CHECK_THROWS_AS(analyze(coarse, samples, 3), AccuracyError);
}

TEST_CASE("tangential gradient matches finite differences, including the poles") {
    std::mt19937_64 rng(5);
    const double h = 1e-5;
    for (int n : {2, 3}) {
        const auto c = random_coefficients(rng, n, 6);
        std::vector<Vec3> points;
        for (int i = 0; i < 20; ++i) points.push_back(random_unit(rng, n));
        if (n == 3) {
            points.push_back({0.0, 0.0, 1.0});
            points.push_back({0.0, 0.0, -1.0});
        }
        for (const auto& x : points) {
            const auto ps = synthesize_point(c, x);
            CHECK(std::abs(dot(ps.gradient, x)) <= 1e-12);
            // Two orthonormal tangent directions.
            Vec3 a = std::abs(x[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
            if (n == 2) a = {-x[1], x[0], 0.0};
            const double ax = dot(a, x);
            Vec3 e1{a[0] - ax * x[0], a[1] - ax * x[1], a[2] - ax * x[2]};
            const double l = norm(e1);
            e1 = {e1[0] / l, e1[1] / l, e1[2] / l};
            std::vector<Vec3> dirs{e1};
            if (n == 3)
                dirs.push_back({x[1] * e1[2] - x[2] * e1[1], x[2] * e1[0] - x[0] * e1[2], x[0] * e1[1] - x[1] * e1[0]});
            for (const auto& e : dirs) {
                const double fd = (synthesize_point(c, geodesic(x, e, h)).value -
                                   synthesize_point(c, geodesic(x, e, -h)).value) / (2.0 * h);
                CHECK(std::abs(fd - dot(ps.gradient, e)) <= 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("Sobolev norms of single modes") {
    auto c3 = HarmonicCoefficients::zeros(3, 2);
    c3.at(2, 1) = 0.1;
    const auto s3 = sobolev_norms(c3);
    CHECK(s3.l2_sq == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(s3.grad_sq == doctest::Approx(0.06).epsilon(1e-14));

    auto c2 = HarmonicCoefficients::zeros(2, 3);
    c2.at(3, 1) = 1.0;
    CHECK(sobolev_norms(c2).grad_sq == 9.0);
}

TEST_CASE("Poincare inequality without the first two eigenspaces") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = trial % 2 ? 3 : 2;
        auto c = random_coefficients(rng, n, 1 + trial % 7);
        for (std::size_t j = 0; j < c.size(); ++j)
            if (c.degree_of(j) <= 1) c.values[j] = 0.0;
        const auto s = sobolev_norms(c);
        CHECK(s.grad_sq >= 2.0 * n * s.l2_sq * (1.0 - 1e-14));
    }
}

TEST_CASE("coefficient arithmetic and JSON round trip") {
    auto a = HarmonicCoefficients::zeros(2, 1);
    a.at(1, 2) = 2.0;
    auto b = HarmonicCoefficients::zeros(2, 3);
    b.at(3, 1) = 1.0;
    const auto s = 0.5 * a + b;
    CHECK(s.max_degree == 3);
    CHECK(s.at(1, 2) == 1.0);
    CHECK(s.at(3, 1) == 1.0);
    const auto back = HarmonicCoefficients::from_json(s.to_json());
    CHECK(back.values == s.values);
    auto bad = s.to_json();
    bad["coefficients"].push_back(1.0);
    CHECK_THROWS_AS(HarmonicCoefficients::from_json(bad), ArgumentError);
}
