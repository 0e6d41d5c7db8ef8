#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wiso/penalized.hpp"

using namespace wiso;
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;

namespace {

// w = t^2, n = 2: Phi(rho) = pi (e^{rho^2} - 1).
double f_square(double rho, double l1, double l2, double alpha) {
    const double D = pi * (std::exp(rho * rho) - e);
    return 2 * pi * rho * std::exp(rho * rho) + l1 * std::abs(D) + l2 * std::abs(std::abs(D) - alpha);
}

NearlySphericalSet centered(int n, double r, double rho, int K) {
    auto u = HarmonicCoefficients::zeros(n, K);
    u.at(0, 1) = (rho / r - 1.0) * std::sqrt(unit_sphere_area(n));
    return {n, r, u};
}

}  // namespace

TEST_CASE("thresholds") {
    auto t = thresholds(zero_profile(), 1.0, 2);
    CHECK(t.lambda1_min == 1.0);
    CHECK(t.lambda2_min == 24.0);
    t = thresholds(square_profile(), 1.0, 2);
    CHECK(t.lambda1_min == 3.0);
    CHECK(t.lambda2_min == 32.0);
    t = thresholds(square_profile(), 2.0, 3);
    CHECK(t.lambda1_min == 10.0);
    CHECK(t.lambda2_min == 32.0);
    CHECK_THROWS_AS(thresholds(square_profile(), 0.0, 2), ArgumentError);

    const auto F = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2);
    CHECK(F.lambda1_ok());
    CHECK(F.lambda2_ok());
    const PenalizedFunctional G(square_profile(), 1.0, 2, 2.9, 40.0);
    CHECK_FALSE(G.lambda1_ok());
    CHECK_THROWS_AS(PenalizedFunctional(square_profile(), 1.0, 2, -1.0, 0.0), ArgumentError);
}

TEST_CASE("evaluate J on balls") {
    const MeasureGrid grid(2, 64, 4);
    const auto F = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2);
    const auto ball = centered(2, 1.0, 1.0, 4);
    const auto j = evaluate_j(F, ball, grid);
    CHECK(j.total.value == doctest::Approx(2 * pi * e).epsilon(1e-13));
    CHECK(j.symdiff.value == 0.0);

    const auto Fa = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2, 1.0, 0.1);
    CHECK(evaluate_j(Fa, ball, grid).total.value == doctest::Approx(2 * pi * e + 0.1 * 32).epsilon(1e-13));

    for (double rho : {0.7, 0.95, 1.2}) {
        for (double alpha : {0.0, 0.3}) {
            const PenalizedFunctional G(square_profile(), 1.0, 2, 3.0, 32.0, alpha);
            const double oracle = f_square(rho, 3.0, 32.0, alpha);
            CHECK(std::abs(evaluate_j(G, centered(2, 1.0, rho, 4), grid).total.value - oracle) <= 1e-10 * oracle);
            CHECK(std::abs(radial_reduction(G, rho) - oracle) <= 1e-12 * oracle);
        }
    }
    // n = 3 reduction against the node-sum functional.
    const MeasureGrid g3(3, 24, 2);
    const auto F3 = PenalizedFunctional::at_thresholds(cosh_profile(), 0.8, 3);
    for (double rho : {0.6, 0.9}) {
        const double a = evaluate_j(F3, centered(3, 0.8, rho, 2), g3).total.value;
        CHECK(std::abs(a - radial_reduction(F3, rho)) <= 1e-10 * a);
    }
    CHECK_THROWS_AS(evaluate_j(F, centered(3, 1.0, 1.0, 2), g3), ArgumentError);
}

TEST_CASE("smoothed functional") {
    const MeasureGrid grid(2, 64, 4);
    const auto F = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2);
    const auto ball = centered(2, 1.0, 1.0, 4);
    CHECK(evaluate_j_smoothed(F, ball, grid, 1e-8) == doctest::Approx(2 * pi * e).epsilon(1e-13));
    auto u = HarmonicCoefficients::zeros(2, 4);
    u.at(2, 1) = 0.02;
    u.at(1, 2) = -0.01;
    const NearlySphericalSet E{2, 1.0, u};
    const double exact = evaluate_j(F, E, grid).total.value;
    CHECK(std::abs(evaluate_j_smoothed(F, E, grid, 1e-8) - exact) <= 1e-3 * exact);
}

TEST_CASE("radial scan") {
    const auto F = PenalizedFunctional(square_profile(), 1.0, 2, 3.0, 0.0);
    const auto rep = radial_scan(F);
    CHECK(rep.passed());
    CHECK(rep.scalar("argmin_rho") == 1.0);

    // With w = 0 the minimum over [r/2, 2r] is not at r when lambda1 = n - 1 + r w'(r)
    // alone: f(1/2) = 7 pi / 4 < f(1) = 2 pi.
    const auto Z = PenalizedFunctional(zero_profile(), 1.0, 2, 1.0, 0.0);
    CHECK(radial_reduction(Z, 0.5) == doctest::Approx(1.75 * pi).epsilon(1e-14));
    CHECK(radial_reduction(Z, 1.0) == doctest::Approx(2 * pi).epsilon(1e-14));
    CHECK_FALSE(radial_scan(Z).passed());
    // Lambda2 at its threshold restores the minimum.
    CHECK(radial_scan(PenalizedFunctional::at_thresholds(zero_profile(), 1.0, 2)).passed());
}

TEST_CASE("ball minimality, sampled") {
    const auto F = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2);
    const auto rep = ball_minimality_check(F, 20, 11);
    CHECK(rep.passed());
    CHECK(rep.table("samples")->rows.size() == 20u);
    CHECK(rep.table("directional")->rows.size() == 18u);
    CHECK(rep.scalar("min_excess") > 0.0);

    // Below the thresholds the audit verdicts fail.
    const PenalizedFunctional G(square_profile(), 1.0, 2, 1.0, 1.0);
    const auto low = ball_minimality_check(G, 2, 1);
    CHECK_FALSE(low.passed());
    CHECK_THROWS_AS(ball_minimality_check(F, 0, 1), ArgumentError);
}

TEST_CASE("descent") {
    const auto F = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2);
    DescentOptions opt;
    SUBCASE("the ball is a fixed point up to smoothing") {
        const auto res = minimize_j(F, HarmonicCoefficients::zeros(2, 8), opt);
        CHECK(res.final_sup_u < 1e-6);
        CHECK(res.final_j.total.value == doctest::Approx(2 * pi * e).epsilon(1e-7));
    }
    SUBCASE("random start") {
        const MeasureGrid grid(2, default_resolution(2), 8);
        const auto init = random_perturbation(2, 8, 5, 0.05, grid);
        const auto res = minimize_j(F, init, opt);
        CHECK(res.final_sup_u < 1e-3);
        CHECK(std::abs(res.final_j.total.value / (2 * pi * e) - 1) <= 1e-6);
        const auto& rows = res.trace.rows;
        REQUIRE(rows.size() > 2);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] < rows[i - 1][1]);
    }
    SUBCASE("thresholds enforced") {
        const PenalizedFunctional G(square_profile(), 1.0, 2, 0.0, 0.0);
        CHECK_THROWS_AS(minimize_j(G, HarmonicCoefficients::zeros(2, 8), opt), PreconditionError);
        opt.allow_below_threshold = true;
        opt.steps = 5;
        const MeasureGrid grid(2, default_resolution(2), 8);
        const auto res = minimize_j(G, random_perturbation(2, 8, 5, 0.05, grid), opt);
        CHECK(res.final_j.total.value < 2 * pi * e);
        CHECK(res.status == DescentStatus::StepLimit);
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(minimize_j(F, HarmonicCoefficients::zeros(3, 2), opt), ArgumentError);
        opt.max_degree = 2;
        auto u = HarmonicCoefficients::zeros(2, 4);
        u.at(4, 1) = 0.01;
        CHECK_THROWS_AS(minimize_j(F, u, opt), ArgumentError);
    }
}

TEST_CASE("descent experiment") {
    const auto F = PenalizedFunctional::at_thresholds(square_profile(), 1.0, 2);
    PenalizedRunOptions opt;
    opt.seeds = 2;
    const auto rep = penalized_descent(F, opt);
    CHECK(rep.passed());
    CHECK(rep.table("runs")->rows.size() == 2u);
    CHECK(rep.scalar("control_objective") < 2 * pi * e);
}
