#pragma once

// Set models: radial graphs over the sphere, translated balls, ellipsoids
// and the seeded union of small balls used in the negative-power example.

#include <cstdint>
#include <random>
#include <vector>

#include "json.hpp"
#include "wiso/core.hpp"
#include "wiso/harmonics.hpp"

namespace wiso {

/// Boundary { r x (1 + u(x)) : x in S^{n-1} } with u given by its harmonic
/// coefficients.
struct NearlySphericalSet {
    int n = 2;
    double r = 1.0;
    HarmonicCoefficients u;

    static NearlySphericalSet ball(int n, double r, int max_degree = 0);

    nlohmann::ordered_json to_json() const;
    static NearlySphericalSet from_json(const nlohmann::ordered_json& j);
};

/// Radius and tangential Jacobian J = r^{n-1}(1+u)^{n-2} sqrt((1+u)^2 + |grad u|^2)
/// at one node.
struct SurfaceElement {
    double radius = 0.0;
    double jacobian = 0.0;
};

/// Per-node surface data on the table's rule. Throws DegenerateShape when
/// 1 + u <= 0 at a node.
std::vector<SurfaceElement> surface_elements(const NearlySphericalSet& E, const BasisTable& table);
std::vector<SurfaceElement> surface_elements(const NearlySphericalSet& E, const SphereRule& rule);

struct W1InfNorms {
    double sup_u = 0.0;
    double sup_grad_u = 0.0;
};
/// Sampled sup |u| and sup |grad u| over the rule's nodes.
W1InfNorms sample_w1inf(const NearlySphericalSet& E, const SphereRule& rule);
W1InfNorms sample_w1inf(const NearlySphericalSet& E, const BasisTable& table);

/// Ball of radius rho centred at eps e_1 (eps may be negative).
struct OffCenterBall {
    int n = 2;
    double eps = 0.0;
    double rho = 1.0;

    OffCenterBall(int n, double eps, double rho);
    /// Distance from the origin to the boundary along direction cos(theta)
    /// from e_1. Requires |eps| < rho.
    double radial(double cos_theta) const;

    nlohmann::ordered_json to_json() const;
    static OffCenterBall from_json(const nlohmann::ordered_json& j);
};

/// Image of the unit ball under diag(axes).
struct Ellipsoid {
    std::vector<double> axes;

    explicit Ellipsoid(std::vector<double> axes);
    int n() const { return static_cast<int>(axes.size()); }
    /// Radial function R(x) = 1 / |diag(axes)^{-1} x| for unit x.
    double radial(const Vec3& x) const;
    /// H^{n-1} density of the pushed-forward sphere: det(S) |S^{-1} x|.
    double area_factor(const Vec3& x) const;

    nlohmann::ordered_json to_json() const;
    static Ellipsoid from_json(const nlohmann::ordered_json& j);
};

struct Ball {
    Vec3 center{0.0, 0.0, 0.0};
    double radius = 0.0;
};

/// First N balls of the union with radii r_i = r 2^{-i/n} and centres drawn
/// from a seeded uniform sequence in B_1, plus bounds for the omitted tail.
struct BallUnion {
    int n = 2;
    double p = 0.0;
    double alpha = 0.0;
    double r = 0.0;
    std::uint64_t seed = 0;
    std::vector<Ball> balls;
    /// Candidate index chosen for each ball (selection trace).
    std::vector<std::size_t> chosen;
    std::size_t pool_size = 0;
    /// True iff |q_i|^alpha > 2^alpha r_i for every stored ball.
    bool separation_holds = false;
    /// sum_{i >= N} omega_n r_i^n.
    double volume_tail = 0.0;
    /// sum_{i >= N} n omega_n r_i^{n-1+p/alpha}.
    double perimeter_tail = 0.0;

    nlohmann::ordered_json to_json() const;
};

/// Uniform point of B_1 in R^n from a 64-bit stream (rejection sampling with
/// a fixed conversion, so results do not depend on the standard library).
class UnitBallSampler {
public:
    UnitBallSampler(int n, std::uint64_t seed);
    Vec3 next();
    /// Uniform double in [0, 1).
    double uniform();

private:
    int n_;
    std::mt19937_64 rng_;
};

/// Throws ArgumentError unless alpha > max(1, -p/(n-1)), 0 < r < 2^{-alpha},
/// p < 1 - n and N >= 1; PoolExhausted when the candidate pool runs out.
BallUnion build_counterexample(int n, double p, double alpha, double r, int N, std::uint64_t seed,
                               std::size_t pool_size = 200000);

}  // namespace wiso
