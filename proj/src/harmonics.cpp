#include "wiso/harmonics.hpp"

#include <cmath>
#include <numbers>

namespace wiso {

namespace {

void require_dimension(int n) {
    if (n != 2 && n != 3)
        throw UnsupportedDimension("harmonic bases exist for n = 2, 3 only (got n = " +
                                   std::to_string(n) + ")");
}

Vec3 tangential(const Vec3& g, const Vec3& x) {
    const double s = dot(g, x);
    return {g[0] - s * x[0], g[1] - s * x[1], g[2] - s * x[2]};
}

// Normalization of the n = 3 basis function of degree k and order m.
double sh_norm(int k, int m) {
    double ratio = 1.0;  // (k-m)! / (k+m)!
    for (int j = k - m + 1; j <= k + m; ++j) ratio /= j;
    const double base = (2.0 * k + 1.0) / (4.0 * std::numbers::pi) * ratio;
    return std::sqrt(m == 0 ? base : 2.0 * base);
}

}  // namespace

int harmonic_multiplicity(int n, int k) {
    require_dimension(n);
    if (k < 0) throw ArgumentError("negative harmonic degree");
    if (n == 2) return k == 0 ? 1 : 2;
    return 2 * k + 1;
}

std::size_t harmonic_count(int n, int max_degree) {
    require_dimension(n);
    if (max_degree < 0) throw ArgumentError("negative max degree");
    if (n == 2) return static_cast<std::size_t>(2 * max_degree + 1);
    return static_cast<std::size_t>((max_degree + 1) * (max_degree + 1));
}

std::size_t harmonic_index(int n, int k, int i) {
    const int g = harmonic_multiplicity(n, k);
    if (i < 1 || i > g)
        throw ArgumentError("harmonic index i = " + std::to_string(i) + " out of range 1.." +
                            std::to_string(g) + " for degree " + std::to_string(k));
    if (n == 2) return k == 0 ? 0 : static_cast<std::size_t>(2 * k - 2 + i);
    return static_cast<std::size_t>(k * k + i - 1);
}

HarmonicCoefficients HarmonicCoefficients::zeros(int n, int max_degree) {
    HarmonicCoefficients c;
    c.n = n;
    c.max_degree = max_degree;
    c.values.assign(harmonic_count(n, max_degree), 0.0);
    return c;
}

double& HarmonicCoefficients::at(int k, int i) {
    if (k > max_degree) throw ArgumentError("degree exceeds stored max degree");
    return values[harmonic_index(n, k, i)];
}

double HarmonicCoefficients::at(int k, int i) const {
    if (k > max_degree) throw ArgumentError("degree exceeds stored max degree");
    return values[harmonic_index(n, k, i)];
}

int HarmonicCoefficients::degree_of(std::size_t j) const {
    if (n == 2) return static_cast<int>((j + 1) / 2);
    return static_cast<int>(std::sqrt(static_cast<double>(j)) + 1e-9);
}

HarmonicCoefficients& HarmonicCoefficients::operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
}

HarmonicCoefficients& HarmonicCoefficients::operator+=(const HarmonicCoefficients& other) {
    if (other.n != n) throw ArgumentError("adding coefficients of different dimensions");
    if (other.max_degree > max_degree) {
        const auto old = *this;
        *this = zeros(n, other.max_degree);
        for (std::size_t j = 0; j < old.values.size(); ++j) values[j] = old.values[j];
    }
    for (std::size_t j = 0; j < other.values.size(); ++j) values[j] += other.values[j];
    return *this;
}

HarmonicCoefficients operator*(double s, HarmonicCoefficients c) {
    c *= s;
    return c;
}

HarmonicCoefficients operator+(HarmonicCoefficients a, const HarmonicCoefficients& b) {
    a += b;
    return a;
}

nlohmann::ordered_json HarmonicCoefficients::to_json() const {
    return {{"n", n}, {"max_degree", max_degree}, {"coefficients", values}};
}

HarmonicCoefficients HarmonicCoefficients::from_json(const nlohmann::ordered_json& j) {
    HarmonicCoefficients c = zeros(j.at("n").get<int>(), j.at("max_degree").get<int>());
    const auto v = j.at("coefficients").get<std::vector<double>>();
    if (v.size() != c.values.size())
        throw ArgumentError("coefficient vector has " + std::to_string(v.size()) +
                            " entries, expected " + std::to_string(c.values.size()));
    c.values = v;
    return c;
}

void basis_all(int n, int max_degree, const Vec3& x_in, std::span<double> values,
               std::span<Vec3> gradients) {
    const std::size_t count = harmonic_count(n, max_degree);
    if (values.size() < count || gradients.size() < count)
        throw ArgumentError("basis_all: output spans too small");
    const double r = norm(x_in);
    const Vec3 x{x_in[0] / r, x_in[1] / r, x_in[2] / r};
    const int K = max_degree;

    // C_m + i S_m = (x + i y)^m.
    std::vector<double> C(static_cast<std::size_t>(K + 1)), S(static_cast<std::size_t>(K + 1));
    C[0] = 1.0;
    S[0] = 0.0;
    for (int m = 0; m < K; ++m) {
        C[m + 1] = x[0] * C[m] - x[1] * S[m];
        S[m + 1] = x[0] * S[m] + x[1] * C[m];
    }

    if (n == 2) {
        const double c0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        const double ck = 1.0 / std::sqrt(std::numbers::pi);
        values[0] = c0;
        gradients[0] = {0.0, 0.0, 0.0};
        for (int k = 1; k <= K; ++k) {
            const std::size_t jc = static_cast<std::size_t>(2 * k - 1), js = jc + 1;
            values[jc] = ck * C[k];
            values[js] = ck * S[k];
            const Vec3 gc{ck * k * C[k - 1], -ck * k * S[k - 1], 0.0};
            const Vec3 gs{ck * k * S[k - 1], ck * k * C[k - 1], 0.0};
            gradients[jc] = tangential(gc, x);
            gradients[js] = tangential(gs, x);
        }
        return;
    }

    // Q[l][m] = d^m P_l / dz^m, zero for m > l.
    const double z = x[2];
    const std::size_t w = static_cast<std::size_t>(K + 2);
    std::vector<double> Q(w * w, 0.0);
    auto q = [&](int l, int m) -> double& { return Q[static_cast<std::size_t>(l) * w + static_cast<std::size_t>(m)]; };
    double dfact = 1.0;  // (2m-1)!!
    for (int m = 0; m <= K; ++m) {
        if (m > 0) dfact *= (2.0 * m - 1.0);
        q(m, m) = dfact;
        if (m + 1 <= K) q(m + 1, m) = (2.0 * m + 1.0) * z * dfact;
        for (int l = m + 2; l <= K; ++l)
            q(l, m) = ((2.0 * l - 1.0) * z * q(l - 1, m) - (l + m - 1.0) * q(l - 2, m)) / (l - m);
    }

    for (int k = 0; k <= K; ++k) {
        const std::size_t base = static_cast<std::size_t>(k * k);
        const double n0 = sh_norm(k, 0);
        values[base] = n0 * q(k, 0);
        gradients[base] = tangential({0.0, 0.0, n0 * q(k, 1)}, x);
        for (int m = 1; m <= k; ++m) {
            const double nm = sh_norm(k, m);
            const double qm = q(k, m), qm1 = q(k, m + 1);
            const std::size_t jc = base + static_cast<std::size_t>(2 * m - 1), js = jc + 1;
            values[jc] = nm * qm * C[m];
            values[js] = nm * qm * S[m];
            const Vec3 gc{nm * qm * m * C[m - 1], -nm * qm * m * S[m - 1], nm * qm1 * C[m]};
            const Vec3 gs{nm * qm * m * S[m - 1], nm * qm * m * C[m - 1], nm * qm1 * S[m]};
            gradients[jc] = tangential(gc, x);
            gradients[js] = tangential(gs, x);
        }
    }
}

double basis_eval(int n, int k, int i, const Vec3& x) {
    const std::size_t j = harmonic_index(n, k, i);
    const std::size_t count = harmonic_count(n, k);
    std::vector<double> v(count);
    std::vector<Vec3> g(count);
    basis_all(n, k, x, v, g);
    return v[j];
}

Vec3 basis_gradient(int n, int k, int i, const Vec3& x) {
    const std::size_t j = harmonic_index(n, k, i);
    const std::size_t count = harmonic_count(n, k);
    std::vector<double> v(count);
    std::vector<Vec3> g(count);
    basis_all(n, k, x, v, g);
    return g[j];
}

BasisTable::BasisTable(const SphereRule& rule, int max_degree)
    : rule_(&rule),
      max_degree_(max_degree),
      count_(harmonic_count(rule.dimension(), max_degree)),
      values_(rule.size() * count_),
      grads_(rule.size() * count_) {
    const auto& nodes = rule.nodes();
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        basis_all(rule.dimension(), max_degree, nodes[p],
                  std::span<double>(values_.data() + p * count_, count_),
                  std::span<Vec3>(grads_.data() + p * count_, count_));
    }
}

SampledField BasisTable::synthesize(const HarmonicCoefficients& c) const {
    if (c.n != rule_->dimension()) throw ArgumentError("coefficient dimension does not match rule");
    if (c.max_degree > max_degree_) throw ArgumentError("coefficients exceed tabulated degree");
    const std::size_t used = c.values.size();
    SampledField f;
    f.values.assign(rule_->size(), 0.0);
    f.gradients.assign(rule_->size(), Vec3{0.0, 0.0, 0.0});
    for (std::size_t p = 0; p < rule_->size(); ++p) {
        const double* v = values_.data() + p * count_;
        const Vec3* g = grads_.data() + p * count_;
        double s = 0.0;
        Vec3 gs{0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < used; ++j) {
            const double a = c.values[j];
            if (a == 0.0) continue;
            s += a * v[j];
            gs[0] += a * g[j][0];
            gs[1] += a * g[j][1];
            gs[2] += a * g[j][2];
        }
        f.values[p] = s;
        f.gradients[p] = gs;
    }
    return f;
}

PointSample synthesize_point(const HarmonicCoefficients& c, const Vec3& x) {
    std::vector<double> v(c.values.size());
    std::vector<Vec3> g(c.values.size());
    basis_all(c.n, c.max_degree, x, v, g);
    PointSample out;
    for (std::size_t j = 0; j < v.size(); ++j) {
        out.value += c.values[j] * v[j];
        for (int d = 0; d < 3; ++d) out.gradient[static_cast<std::size_t>(d)] += c.values[j] * g[j][static_cast<std::size_t>(d)];
    }
    return out;
}

SampledField synthesize(const HarmonicCoefficients& c, const SphereRule& rule) {
    return BasisTable(rule, c.max_degree).synthesize(c);
}

HarmonicCoefficients analyze(const SphereRule& rule, std::span<const double> samples, int max_degree) {
    if (rule.resolution() < 4 * max_degree)
        throw AccuracyError("analyze: resolution " + std::to_string(rule.resolution()) +
                            " is below 4K = " + std::to_string(4 * max_degree));
    if (samples.size() != rule.size()) throw ArgumentError("analyze: sample count does not match rule");
    const int n = rule.dimension();
    HarmonicCoefficients c = HarmonicCoefficients::zeros(n, max_degree);
    const std::size_t count = c.values.size();
    std::vector<double> v(count);
    std::vector<Vec3> g(count);
    const auto& w = rule.weights();
    for (std::size_t p = 0; p < rule.size(); ++p) {
        if (!std::isfinite(samples[p]))
            throw IntegrandError("non-finite sample at sphere node " + std::to_string(p));
        basis_all(n, max_degree, rule.nodes()[p], v, g);
        const double ws = w[p] * samples[p];
        for (std::size_t j = 0; j < count; ++j) c.values[j] += ws * v[j];
    }
    return c;
}

SobolevNorms sobolev_norms(const HarmonicCoefficients& c) {
    SobolevNorms s;
    for (std::size_t j = 0; j < c.values.size(); ++j) {
        const double a2 = c.values[j] * c.values[j];
        s.l2_sq += a2;
        s.grad_sq += harmonic_eigenvalue(c.n, c.degree_of(j)) * a2;
    }
    return s;
}

}  // namespace wiso
