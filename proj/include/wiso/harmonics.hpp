#pragma once

// Real orthonormal spherical harmonics on S^1 and S^2.
//
// Indexing (i is 1-based, as in a_{k,i}):
//   n = 2: Y_{0,1} = 1/sqrt(2 pi); for k >= 1, Y_{k,1} = cos(k t)/sqrt(pi),
//          Y_{k,2} = sin(k t)/sqrt(pi).
//   n = 3: Y_{k,1} is zonal (m = 0); Y_{k,2m} ~ cos(m phi), Y_{k,2m+1} ~ sin(m phi).
//
// Each basis function is evaluated through its polynomial extension to R^n,
// so tangential gradients are analytic and regular at the poles.

#include <span>
#include <vector>

#include "json.hpp"
#include "wiso/core.hpp"
#include "wiso/quadrature.hpp"

namespace wiso {

/// Dimension G(n, k) of degree-k harmonics: n = 2 -> 1 or 2, n = 3 -> 2k+1.
int harmonic_multiplicity(int n, int k);
/// Number of basis functions of degree <= max_degree.
std::size_t harmonic_count(int n, int max_degree);
/// Flat index of Y_{k,i}.
std::size_t harmonic_index(int n, int k, int i);
/// Laplace-Beltrami eigenvalue k(k+n-2).
inline double harmonic_eigenvalue(int n, int k) { return static_cast<double>(k) * (k + n - 2); }

struct HarmonicCoefficients {
    int n = 2;
    int max_degree = 0;
    std::vector<double> values;

    static HarmonicCoefficients zeros(int n, int max_degree);

    std::size_t size() const { return values.size(); }
    double& at(int k, int i);
    double at(int k, int i) const;
    /// Degree of the flat index j.
    int degree_of(std::size_t j) const;

    HarmonicCoefficients& operator*=(double s);
    HarmonicCoefficients& operator+=(const HarmonicCoefficients& other);

    nlohmann::ordered_json to_json() const;
    static HarmonicCoefficients from_json(const nlohmann::ordered_json& j);
};

HarmonicCoefficients operator*(double s, HarmonicCoefficients c);
HarmonicCoefficients operator+(HarmonicCoefficients a, const HarmonicCoefficients& b);

/// Value of Y_{k,i} at the unit vector x. Throws ArgumentError on a bad index
/// and UnsupportedDimension outside n in {2, 3}.
double basis_eval(int n, int k, int i, const Vec3& x);
/// Tangential gradient of Y_{k,i} at x, as a vector in R^n.
Vec3 basis_gradient(int n, int k, int i, const Vec3& x);

/// All basis values and tangential gradients of degree <= max_degree at one
/// point; reuses the Legendre recurrences across indices.
void basis_all(int n, int max_degree, const Vec3& x, std::span<double> values,
               std::span<Vec3> gradients);

/// Node values and tangential gradients of a function on a sphere rule.
struct SampledField {
    std::vector<double> values;
    std::vector<Vec3> gradients;
};

/// Basis functions tabulated on a rule, for repeated synthesis.
class BasisTable {
public:
    BasisTable(const SphereRule& rule, int max_degree);

    int max_degree() const { return max_degree_; }
    std::size_t basis_size() const { return count_; }
    const SphereRule& rule() const { return *rule_; }

    SampledField synthesize(const HarmonicCoefficients& c) const;
    double value(std::size_t node, std::size_t basis) const { return values_[node * count_ + basis]; }
    const Vec3& gradient(std::size_t node, std::size_t basis) const { return grads_[node * count_ + basis]; }

private:
    const SphereRule* rule_;
    int max_degree_;
    std::size_t count_;
    std::vector<double> values_;
    std::vector<Vec3> grads_;
};

/// Pointwise value and tangential gradient of the expansion at x.
struct PointSample {
    double value = 0.0;
    Vec3 gradient{0.0, 0.0, 0.0};
};
PointSample synthesize_point(const HarmonicCoefficients& c, const Vec3& x);

/// Values and gradients at every node of `rule`.
SampledField synthesize(const HarmonicCoefficients& c, const SphereRule& rule);

/// a_{k,i} = integral of u Y_{k,i} by quadrature. Throws AccuracyError when
/// the rule resolution is below 4 * max_degree.
HarmonicCoefficients analyze(const SphereRule& rule, std::span<const double> samples, int max_degree);

struct SobolevNorms {
    double l2_sq = 0.0;    // sum a^2
    double grad_sq = 0.0;  // sum k(k+n-2) a^2
};
SobolevNorms sobolev_norms(const HarmonicCoefficients& c);

}  // namespace wiso
