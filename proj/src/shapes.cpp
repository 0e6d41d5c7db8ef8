#include "wiso/shapes.hpp"

#include "wiso/report.hpp"

#include <algorithm>
#include <list>

namespace wiso {

NearlySphericalSet NearlySphericalSet::ball(int n, double r, int max_degree) {
    if (!(r > 0.0)) throw ArgumentError("reference radius must be positive");
    return {n, r, HarmonicCoefficients::zeros(n, max_degree)};
}

nlohmann::ordered_json NearlySphericalSet::to_json() const {
    return {{"type", "nearly-spherical"}, {"n", n}, {"r", r}, {"u", u.to_json()}};
}

NearlySphericalSet NearlySphericalSet::from_json(const nlohmann::ordered_json& j) {
    if (j.at("type") != "nearly-spherical") throw ArgumentError("not a nearly-spherical set");
    NearlySphericalSet E{j.at("n").get<int>(), j.at("r").get<double>(),
                         HarmonicCoefficients::from_json(j.at("u"))};
    if (E.u.n != E.n) throw ArgumentError("coefficient dimension does not match set dimension");
    return E;
}

std::vector<SurfaceElement> surface_elements(const NearlySphericalSet& E, const BasisTable& table) {
    if (E.n != table.rule().dimension()) throw ArgumentError("set and rule dimensions differ");
    const SampledField f = table.synthesize(E.u);
    const double rn1 = std::pow(E.r, E.n - 1);
    std::vector<SurfaceElement> out(f.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = 1.0 + f.values[i];
        if (!(s > 0.0))
            throw DegenerateShape("1 + u = " + format_short(s) + " at sphere node " + std::to_string(i));
        const double g2 = dot(f.gradients[i], f.gradients[i]);
        out[i].radius = E.r * s;
        out[i].jacobian = rn1 * std::pow(s, E.n - 2) * std::sqrt(s * s + g2);
    }
    return out;
}

std::vector<SurfaceElement> surface_elements(const NearlySphericalSet& E, const SphereRule& rule) {
    return surface_elements(E, BasisTable(rule, E.u.max_degree));
}

W1InfNorms sample_w1inf(const NearlySphericalSet& E, const BasisTable& table) {
    const SampledField f = table.synthesize(E.u);
    W1InfNorms out;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        out.sup_u = std::max(out.sup_u, std::abs(f.values[i]));
        out.sup_grad_u = std::max(out.sup_grad_u, norm(f.gradients[i]));
    }
    return out;
}

W1InfNorms sample_w1inf(const NearlySphericalSet& E, const SphereRule& rule) {
    return sample_w1inf(E, BasisTable(rule, E.u.max_degree));
}

OffCenterBall::OffCenterBall(int n_, double eps_, double rho_) : n(n_), eps(eps_), rho(rho_) {
    if (n < 2) throw ArgumentError("off-center ball needs n >= 2");
    if (!(rho > 0.0)) throw ArgumentError("off-center ball radius must be positive");
}

double OffCenterBall::radial(double c) const {
    if (!(std::abs(eps) < rho))
        throw UnsupportedGeometry("off-center ball with |eps| >= rho is not star-shaped about the origin");
    // |R x - eps e1| = rho with x . e1 = c.
    const double s2 = std::max(0.0, 1.0 - c * c);
    return eps * c + std::sqrt(rho * rho - eps * eps * s2);
}

nlohmann::ordered_json OffCenterBall::to_json() const {
    return {{"type", "off-center-ball"}, {"n", n}, {"eps", eps}, {"rho", rho}};
}

OffCenterBall OffCenterBall::from_json(const nlohmann::ordered_json& j) {
    if (j.at("type") != "off-center-ball") throw ArgumentError("not an off-center ball");
    return {j.at("n").get<int>(), j.at("eps").get<double>(), j.at("rho").get<double>()};
}

Ellipsoid::Ellipsoid(std::vector<double> a) : axes(std::move(a)) {
    if (axes.size() < 2 || axes.size() > 3) throw UnsupportedDimension("ellipsoids are modelled for n = 2, 3");
    for (double s : axes)
        if (!(s > 0.0)) throw ArgumentError("ellipsoid semi-axes must be positive");
}

double Ellipsoid::radial(const Vec3& x) const {
    double q = 0.0;
    for (std::size_t i = 0; i < axes.size(); ++i) q += x[i] * x[i] / (axes[i] * axes[i]);
    return 1.0 / std::sqrt(q);
}

double Ellipsoid::area_factor(const Vec3& x) const {
    double det = 1.0;
    for (double s : axes) det *= s;
    return det / radial(x);
}

nlohmann::ordered_json Ellipsoid::to_json() const {
    return {{"type", "ellipsoid"}, {"axes", axes}};
}

Ellipsoid Ellipsoid::from_json(const nlohmann::ordered_json& j) {
    if (j.at("type") != "ellipsoid") throw ArgumentError("not an ellipsoid");
    return Ellipsoid(j.at("axes").get<std::vector<double>>());
}

UnitBallSampler::UnitBallSampler(int n, std::uint64_t seed) : n_(n), rng_(seed) {
    if (n != 2 && n != 3) throw UnsupportedDimension("ball sampling is implemented for n = 2, 3");
}

double UnitBallSampler::uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

Vec3 UnitBallSampler::next() {
    for (;;) {
        Vec3 v{2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0, n_ == 3 ? 2.0 * uniform() - 1.0 : 0.0};
        if (dot(v, v) < 1.0) return v;
    }
}

nlohmann::ordered_json BallUnion::to_json() const {
    nlohmann::ordered_json balls_json = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < balls.size(); ++i) {
        const auto& b = balls[i];
        balls_json.push_back({{"center", std::vector<double>(b.center.begin(), b.center.begin() + n)},
                              {"radius", b.radius},
                              {"candidate", chosen[i]}});
    }
    return {{"type", "ball-union"},    {"n", n},
            {"p", p},                  {"alpha", alpha},
            {"r", r},                  {"seed", seed},
            {"pool_size", pool_size},  {"separation_holds", separation_holds},
            {"volume_tail", volume_tail}, {"perimeter_tail", perimeter_tail},
            {"balls", balls_json}};
}

BallUnion build_counterexample(int n, double p, double alpha, double r, int N, std::uint64_t seed,
                               std::size_t pool_size) {
    if (n != 2 && n != 3) throw UnsupportedDimension("ball unions are built for n = 2, 3");
    if (!(p < 1.0 - n)) throw ArgumentError("counterexample needs p < 1 - n");
    if (!(alpha > std::max(1.0, -p / (n - 1.0))))
        throw ArgumentError("alpha must exceed max(1, -p/(n-1)) = " + format_short(std::max(1.0, -p / (n - 1.0))));
    if (!(r > 0.0 && r < std::pow(2.0, -alpha))) throw ArgumentError("need 0 < r < 2^-alpha");
    if (N < 1) throw ArgumentError("need N >= 1 balls");

    BallUnion U;
    U.n = n;
    U.p = p;
    U.alpha = alpha;
    U.r = r;
    U.seed = seed;
    U.pool_size = pool_size;

    UnitBallSampler sampler(n, seed);
    std::size_t drawn = 0;
    // Candidates drawn so far but not yet used, in index order.
    std::list<std::pair<std::size_t, Vec3>> skipped;
    for (int i = 0; i < N; ++i) {
        const double ri = r * std::pow(2.0, -static_cast<double>(i) / n);
        const double threshold = 2.0 * std::pow(ri, 1.0 / alpha);
        bool found = false;
        for (auto it = skipped.begin(); it != skipped.end(); ++it) {
            if (norm(it->second) > threshold) {
                U.balls.push_back({it->second, ri});
                U.chosen.push_back(it->first);
                skipped.erase(it);
                found = true;
                break;
            }
        }
        while (!found) {
            if (drawn >= pool_size)
                throw PoolExhausted("candidate pool of " + std::to_string(pool_size) + " exhausted after " +
                                    std::to_string(i) + " balls");
            const Vec3 q = sampler.next();
            if (norm(q) > threshold) {
                U.balls.push_back({q, ri});
                U.chosen.push_back(drawn);
                found = true;
            } else {
                skipped.emplace_back(drawn, q);
            }
            ++drawn;
        }
    }

    U.separation_holds = std::all_of(U.balls.begin(), U.balls.end(), [&](const Ball& b) {
        return std::pow(norm(b.center), alpha) > std::pow(2.0, alpha) * b.radius;
    });
    const double wn = unit_ball_volume(n);
    U.volume_tail = wn * std::pow(r, n) * std::pow(2.0, 1.0 - N);
    const double beta = n - 1.0 + p / alpha;
    const double q = std::pow(2.0, -beta / n);
    U.perimeter_tail = n * wn * std::pow(r, beta) * std::pow(q, N) / (1.0 - q);
    return U;
}

}  // namespace wiso
