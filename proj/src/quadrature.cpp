#include "wiso/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace wiso {

namespace {

GaussLegendre compute_gauss_legendre(int order) {
    GaussLegendre gl;
    gl.nodes.resize(static_cast<std::size_t>(order));
    gl.weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_order.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double p = order == 1 ? x : p1;
            const double pm1 = order == 1 ? 1.0 : p0;
            dp = order * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Final derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order == 1 ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(order - 1 - i);
        gl.nodes[lo] = -x;
        gl.nodes[hi] = x;
        gl.weights[lo] = w;
        gl.weights[hi] = w;
    }
    if (order % 2 == 1) gl.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    if (order < 1) throw ArgumentError("Gauss-Legendre order must be >= 1");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(order));
    return *slot;
}

SphereRule::SphereRule(int dimension, int resolution, std::vector<Vec3> nodes,
                       std::vector<double> weights, int polar_count, int azimuth_count)
    : n_(dimension),
      resolution_(resolution),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      polar_count_(polar_count),
      azimuth_count_(azimuth_count) {}

int default_resolution(int n) { return n == 2 ? 256 : 64; }

SphereRule build_sphere_rule(int n, int resolution) {
    if (n < 2) throw ArgumentError("sphere rules need n >= 2");
    if (n >= 4)
        throw UnsupportedDimension("no full quadrature on S^" + std::to_string(n - 1) +
                                   "; use the axisymmetric measures for n >= 4");
    if (resolution < 2) throw ArgumentError("sphere rule resolution must be >= 2");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    if (n == 2) {
        nodes.reserve(static_cast<std::size_t>(resolution));
        weights.assign(static_cast<std::size_t>(resolution), two_pi / resolution);
        for (int j = 0; j < resolution; ++j) {
            const double th = two_pi * j / resolution;
            nodes.push_back({std::cos(th), std::sin(th), 0.0});
        }
        return SphereRule(2, resolution, std::move(nodes), std::move(weights), 1, resolution);
    }
    const auto& gl = gauss_legendre(resolution);
    const int m = 2 * resolution;
    nodes.reserve(static_cast<std::size_t>(resolution * m));
    weights.reserve(static_cast<std::size_t>(resolution * m));
    for (int i = 0; i < resolution; ++i) {
        const double z = gl.nodes[static_cast<std::size_t>(i)];
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < m; ++j) {
            const double ph = two_pi * j / m;
            nodes.push_back({s * std::cos(ph), s * std::sin(ph), z});
            weights.push_back(gl.weights[static_cast<std::size_t>(i)] * two_pi / m);
        }
    }
    return SphereRule(3, resolution, std::move(nodes), std::move(weights), resolution, m);
}

double integrate_sphere(const SphereRule& rule, std::span<const double> values) {
    if (values.size() != rule.size())
        throw ArgumentError("integrate_sphere: " + std::to_string(values.size()) +
                            " values for " + std::to_string(rule.size()) + " nodes");
    const auto& w = rule.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw IntegrandError("non-finite integrand at sphere node " + std::to_string(i));
        sum += w[i] * values[i];
    }
    return sum;
}

RadialRule build_radial_rule(double a, double b, int order, bool adaptive) {
    if (!(a < b)) throw ArgumentError("radial rule needs a < b");
    if (order < 2) throw ArgumentError("radial rule order must be >= 2");
    const auto& gl = gauss_legendre(order);
    RadialRule r;
    r.a = a;
    r.b = b;
    r.order = order;
    r.adaptive = adaptive;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    r.nodes.reserve(gl.nodes.size());
    r.weights.reserve(gl.nodes.size());
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        r.nodes.push_back(mid + half * gl.nodes[i]);
        r.weights.push_back(half * gl.weights[i]);
    }
    return r;
}

}  // namespace wiso
