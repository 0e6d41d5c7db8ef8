#pragma once

// Quadrature on S^{n-1} (n = 2, 3) and on radial intervals.
//
// n = 2: equispaced angles, spectrally accurate for periodic integrands and
//        exact for trigonometric polynomials of degree < resolution.
// n = 3: Gauss-Legendre in cos(theta) (resolution nodes) times equispaced
//        azimuth (2 * resolution nodes).
//
// Higher dimensions are only reached through axisymmetric reductions in the
// measures module.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wiso/core.hpp"

namespace wiso {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached Gauss-Legendre rule with `order` points (order >= 1).
const GaussLegendre& gauss_legendre(int order);

class SphereRule {
public:
    SphereRule(int dimension, int resolution, std::vector<Vec3> nodes, std::vector<double> weights,
               int polar_count, int azimuth_count);

    int dimension() const { return n_; }
    int resolution() const { return resolution_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Vec3>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    /// Product-rule layout (n = 3): node index = polar * azimuth_count + azimuth.
    /// For n = 2 polar_count is 1.
    int polar_count() const { return polar_count_; }
    int azimuth_count() const { return azimuth_count_; }

private:
    int n_;
    int resolution_;
    std::vector<Vec3> nodes_;
    std::vector<double> weights_;
    int polar_count_;
    int azimuth_count_;
};

/// Resolution used when callers do not choose one: 256 (n = 2), 64 (n = 3,
/// i.e. a 64 x 128 product rule).
int default_resolution(int n);

/// Throws UnsupportedDimension for n >= 4 and ArgumentError for n < 2 or a
/// resolution below 2.
SphereRule build_sphere_rule(int n, int resolution);

/// Sum of weights times node values. Throws IntegrandError naming the first
/// node with a non-finite value.
double integrate_sphere(const SphereRule& rule, std::span<const double> values);

template <class F>
    requires std::invocable<F&, const Vec3&>
double integrate_sphere(const SphereRule& rule, F&& f) {
    double sum = 0.0;
    const auto& x = rule.nodes();
    const auto& w = rule.weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = f(x[i]);
        if (!std::isfinite(v))
            throw IntegrandError("non-finite integrand at sphere node " + std::to_string(i));
        sum += w[i] * v;
    }
    return sum;
}

/// Integral of f over S^{n-1} at `resolution` with an error estimate from
/// comparison against the half-resolution rule (plus a round-off floor).
template <class F>
MeasureValue integrate_sphere_estimated(int n, int resolution, F&& f) {
    const SphereRule fine = build_sphere_rule(n, resolution);
    const SphereRule coarse = build_sphere_rule(n, std::max(2, resolution / 2));
    const double a = integrate_sphere(fine, f);
    const double b = integrate_sphere(coarse, f);
    const double mag = integrate_sphere(fine, [&](const Vec3& x) { return std::abs(f(x)); });
    return {a, std::abs(a - b) + 64.0 * 2.2e-16 * mag};
}

/// Gauss-Legendre rule on [a, b].
struct RadialRule {
    double a = 0.0;
    double b = 1.0;
    int order = 0;
    bool adaptive = false;
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double apply(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

/// Throws ArgumentError unless a < b and order >= 2. `adaptive` marks the
/// rule for use with integrate_radial's bisection path.
RadialRule build_radial_rule(double a, double b, int order, bool adaptive = false);

namespace detail {

struct GkPanel {
    double a, b, value, error, l1;
    bool operator<(const GkPanel& o) const { return error < o.error; }
};

// One 31-point Kronrod panel with the embedded 15-point Gauss rule.
template <class F>
GkPanel gk31_panel(F& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    using G = boost::math::quadrature::gauss<double, 15>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = f0 * wk[0], g = f0 * wg[0], l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(mid + half * x[i]), fm = f(mid - half * x[i]);
        k += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
    }
    return {a, b, half * k, half * std::abs(k - g), half * l1};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (31-point) integration of f over [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below rel_tol |I| or a round-off floor of the L1 norm.
/// Panels of width (b - a) / 2^max_depth are frozen, and their error no
/// longer counts toward the stopping test (it is still reported).
template <class F>
MeasureValue integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-13,
                                unsigned max_depth = 12) {
    if (a == b) return {0.0, 0.0};
    constexpr double floor_factor = 32.0 * 2.2e-16;
    const double min_width = std::abs(b - a) / std::ldexp(1.0, static_cast<int>(max_depth));
    std::vector<detail::GkPanel> heap{detail::gk31_panel(f, a, b)};
    std::vector<detail::GkPanel> done;
    double v = heap[0].value, e = heap[0].error, l1 = heap[0].l1, frozen = 0.0;
    while (!heap.empty()) {
        if (!std::isfinite(v)) throw IntegrandError("non-finite value in radial integral");
        if (e - frozen <= std::max(rel_tol * std::abs(v), floor_factor * l1)) break;
        std::pop_heap(heap.begin(), heap.end());
        const auto worst = heap.back();
        heap.pop_back();
        if (std::abs(worst.b - worst.a) <= 2.0 * min_width) {
            done.push_back(worst);
            frozen += worst.error;
            continue;
        }
        const double m = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk31_panel(f, worst.a, m), right = detail::gk31_panel(f, m, worst.b);
        v += left.value + right.value - worst.value;
        e += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        for (const auto& p : {left, right}) {
            heap.push_back(p);
            std::push_heap(heap.begin(), heap.end());
        }
    }
    // Re-sum so the result does not carry the running-sum drift.
    v = e = l1 = 0.0;
    for (const auto* set : {&heap, &done})
        for (const auto& p : *set) {
            v += p.value;
            e += p.error;
            l1 += p.l1;
        }
    if (!std::isfinite(v)) throw IntegrandError("non-finite value in radial integral");
    return {v, e + floor_factor * l1};
}

/// integrate_adaptive on the pieces of [a, b] cut at the given breakpoints.
template <class F>
MeasureValue integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                                 double rel_tol = 1e-13) {
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);
    MeasureValue total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto piece = integrate_adaptive(f, cuts[i], cuts[i + 1], rel_tol);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

/// Applies the rule; adaptive rules delegate to integrate_adaptive and the
/// fixed ones estimate their error against a rule of half the order.
template <class F>
MeasureValue integrate_radial(const RadialRule& rule, F&& f) {
    if (rule.adaptive) return integrate_adaptive(f, rule.a, rule.b, 1e-12);
    const double v = rule.apply(f);
    const RadialRule half = build_radial_rule(rule.a, rule.b, std::max(2, rule.order / 2));
    return {v, std::abs(v - half.apply(f))};
}

}  // namespace wiso
