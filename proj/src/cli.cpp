#include "wiso/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "wiso/core.hpp"
#include "wiso/negpower.hpp"
#include "wiso/penalized.hpp"
#include "wiso/profile.hpp"
#include "wiso/stability.hpp"

namespace wiso {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

RadialWeight make_weight(const WeightSpec& spec) {
    if (spec.name == "power") {
        if (spec.params.size() != 1) throw ArgumentError("power weight takes one parameter, the exponent p");
        return RadialWeight::power(spec.params[0]);
    }
    return RadialWeight::exp_convex(make_profile(spec.name, spec.params));
}

namespace {

ConvexProfile exp_profile(const WeightSpec& spec, const std::string& experiment) {
    const auto W = make_weight(spec);
    if (!W.profile()) throw ArgumentError(experiment + " needs an exp-convex weight, got " + W.describe());
    return *W.profile();
}

double power_exponent(const WeightSpec& spec, const std::string& experiment) {
    const auto W = make_weight(spec);
    if (!W.is_power()) throw ArgumentError(experiment + " needs a power weight, got " + W.describe());
    return W.exponent();
}

// ---------------------------------------------------------------------------
// Config serialization
// ---------------------------------------------------------------------------

template <class T>
T get_field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ArgumentError(std::string("config field '") + key + "' has the wrong type");
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ArgumentError("config key '" + key + "': '" + s + "' is not a number");
}

long long parse_int(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ArgumentError("config key '" + key + "': '" + s + "' is not an integer");
}

// Value types of the flattened keys.
enum class Kind { String, Int, Unsigned, Double, Bool, Doubles, Ints, Strings };

const std::map<std::string, Kind>& key_kinds() {
    static const std::map<std::string, Kind> kinds{
        {"experiment", Kind::String},   {"weight.name", Kind::String},   {"weight.params", Kind::Doubles},
        {"n", Kind::Int},               {"r", Kind::Double},             {"resolution", Kind::Int},
        {"seeds", Kind::Int},           {"seed", Kind::Unsigned},        {"profiles", Kind::Strings},
        {"dims", Kind::Ints},           {"radii", Kind::Doubles},        {"eps", Kind::Doubles},
        {"amplitudes", Kind::Doubles},  {"ts", Kind::Doubles},           {"deltas", Kind::Doubles},
        {"rhos", Kind::Doubles},        {"samples", Kind::Int},          {"quantitative", Kind::Bool},
        {"alpha", Kind::Double},        {"terms", Kind::Int},            {"mc_samples", Kind::Int},
        {"lambda_factor", Kind::Double}, {"penalty_alpha", Kind::Double}, {"shape", Kind::String},
        {"outer", Kind::Double},        {"probe_radius", Kind::Double},  {"half_width", Kind::Double},
        {"out", Kind::String},
    };
    return kinds;
}

json parse_value(const std::string& key, Kind kind, const std::string& raw) {
    switch (kind) {
        case Kind::String:
            return raw;
        case Kind::Int:
            return parse_int(key, raw);
        case Kind::Unsigned: {
            try {
                std::size_t pos = 0;
                if (!raw.empty() && raw[0] != '-') {
                    const unsigned long long v = std::stoull(raw, &pos);
                    if (pos == raw.size()) return v;
                }
            } catch (const std::exception&) {
            }
            throw ArgumentError("config key '" + key + "': '" + raw + "' is not an unsigned integer");
        }
        case Kind::Double:
            return parse_double(key, raw);
        case Kind::Bool:
            if (raw == "true") return true;
            if (raw == "false") return false;
            throw ArgumentError("config key '" + key + "': expected true or false");
        case Kind::Doubles: {
            json a = json::array();
            for (const auto& s : split_list(raw)) a.push_back(parse_double(key, s));
            return a;
        }
        case Kind::Ints: {
            json a = json::array();
            for (const auto& s : split_list(raw)) a.push_back(parse_int(key, s));
            return a;
        }
        case Kind::Strings: {
            json a = json::array();
            for (const auto& s : split_list(raw)) a.push_back(s);
            return a;
        }
    }
    return {};
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void emit_keyvalue(std::ostringstream& os, const json& j, const std::string& prefix) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix + it.key();
        const auto& v = it.value();
        if (v.is_object()) {
            emit_keyvalue(os, v, key + ".");
            continue;
        }
        os << key << " =";
        if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : " ") << scalar_text(v[i]);
        } else {
            const auto s = scalar_text(v);
            if (!s.empty()) os << ' ' << s;
        }
        os << '\n';
    }
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["weight"] = {{"name", c.weight.name}, {"params", c.weight.params}};
    j["n"] = c.n;
    j["r"] = c.r;
    j["resolution"] = c.resolution;
    j["seeds"] = c.seeds;
    j["seed"] = c.seed;
    j["profiles"] = c.profiles;
    j["dims"] = c.dims;
    j["radii"] = c.radii;
    j["eps"] = c.eps;
    j["amplitudes"] = c.amplitudes;
    j["ts"] = c.ts;
    j["deltas"] = c.deltas;
    j["rhos"] = c.rhos;
    j["samples"] = c.samples;
    j["quantitative"] = c.quantitative;
    j["alpha"] = c.alpha;
    j["terms"] = c.terms;
    j["mc_samples"] = c.mc_samples;
    j["lambda_factor"] = c.lambda_factor;
    j["penalty_alpha"] = c.penalty_alpha;
    j["shape"] = c.shape;
    j["outer"] = c.outer;
    j["probe_radius"] = c.probe_radius;
    j["half_width"] = c.half_width;
    j["out"] = c.out;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ArgumentError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "weight") {
            if (!it.value().is_object()) throw ArgumentError("config field 'weight' must be an object");
            for (auto w = it.value().begin(); w != it.value().end(); ++w)
                if (w.key() != "name" && w.key() != "params")
                    throw ArgumentError("unknown config key 'weight." + w.key() + "'");
        } else if (!key_kinds().contains(it.key())) {
            throw ArgumentError("unknown config key '" + it.key() + "'");
        }
    }
    ExperimentConfig c;
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key)) field = get_field<std::decay_t<decltype(field)>>(j, key);
    };
    opt("experiment", c.experiment);
    if (j.contains("weight")) {
        const auto& w = j.at("weight");
        if (w.contains("name")) c.weight.name = get_field<std::string>(w, "name");
        if (w.contains("params")) c.weight.params = get_field<std::vector<double>>(w, "params");
    }
    opt("n", c.n);
    opt("r", c.r);
    opt("resolution", c.resolution);
    opt("seeds", c.seeds);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned())
            throw ArgumentError("config field 'seed' must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    opt("profiles", c.profiles);
    opt("dims", c.dims);
    opt("radii", c.radii);
    opt("eps", c.eps);
    opt("amplitudes", c.amplitudes);
    opt("ts", c.ts);
    opt("deltas", c.deltas);
    opt("rhos", c.rhos);
    opt("samples", c.samples);
    opt("quantitative", c.quantitative);
    opt("alpha", c.alpha);
    opt("terms", c.terms);
    opt("mc_samples", c.mc_samples);
    opt("lambda_factor", c.lambda_factor);
    opt("penalty_alpha", c.penalty_alpha);
    opt("shape", c.shape);
    opt("outer", c.outer);
    opt("probe_radius", c.probe_radius);
    opt("half_width", c.half_width);
    opt("out", c.out);
    return c;
}

std::string to_keyvalue(const ExperimentConfig& c) {
    std::ostringstream os;
    emit_keyvalue(os, to_json(c), "");
    return os.str();
}

ExperimentConfig config_from_keyvalue(const std::string& text) {
    json j = json::object();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        const auto kind = key_kinds().find(key);
        if (kind == key_kinds().end()) throw ArgumentError("unknown config key '" + key + "'");
        const auto value = parse_value(key, kind->second, raw);
        if (const auto dot = key.find('.'); dot != std::string::npos)
            j[key.substr(0, dot)][key.substr(dot + 1)] = value;
        else
            j[key] = value;
    }
    return config_from_json(j);
}

ExperimentConfig parse_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
        }
        return config_from_json(j);
    }
    return config_from_keyvalue(text);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Catalog and defaults
// ---------------------------------------------------------------------------

const std::vector<CatalogEntry>& list_experiments() {
    static const std::vector<CatalogEntry> catalog{
        {"fuglede", "stability_lab",
         "Volume-matched random perturbations of B_r: deficit sign, Fuglede ratio floor, quadratic scaling",
         "Fuglede-type estimate for nearly spherical sets",
         "perturbations: seed, amplitude, c0, w1inf, deficit, deficit_error, grad_sq, ratio_fuglede, ratio_quant, "
         "deficit_half, halving_ratio"},
        {"taylor-identities", "stability_lab",
         "Integration-by-parts identities of the Taylor coefficients and the two divergence-theorem ball identities",
         "Taylor coefficients a_n, b_n, c_n, d_n; ball identities in the necessity argument",
         "identities: profile, n, r, taylor_first, taylor_second, divergence_first, divergence_second, "
         "quadrature_error"},
        {"degenerate-ratio", "stability_lab",
         "Translated balls at a flat weight: second-order expansion and the decaying deficit/symdiff^2 ratio",
         "Necessity of strict convexity at r (translated-ball expansion)",
         "expansion.family: eps, rho, rho_noise, perimeter, perimeter_noise; scan.family: eps, rho, deficit, "
         "deficit_error, symdiff, symdiff_error, ratio, ratio_error"},
        {"ellipsoid-sharpness", "stability_lab",
         "Volume-matched ellipsoids: deficit/symdiff^2 stays in a band while symdiff spans decades",
         "Sharpness of the exponent 2 via ellipsoids",
         "family: t, scale, deficit, deficit_error, symdiff, symdiff_error, ratio, ratio_error; halving: t, "
         "deficit_ratio"},
        {"penalized-min", "penalized_min",
         "Penalized functional at its thresholds: radial reduction, sampled minimality of B_r, descent from random "
         "starts",
         "Penalized functional J with thresholds Lambda_1, Lambda_2",
         "radial.profile: rho, j; samples.samples: seed, sup_u, j, j_error, excess; samples.directional: index, "
         "sign, quotient; descent.runs: seed, steps, status, objective, objective_error, relative_gap, "
         "init_sup_u, final_sup_u; descent.trace: seed, step, objective, grad_norm, sup_u"},
        {"profile-checks", "profile",
         "Isoperimetric profile Phi and its inverse Psi: inversion, derivative identity, profile inequality",
         "Profile Phi, inverse Psi and the derivative identity for Psi",
         "inverse: s, phi, psi_phi, relative_error; derivative: t, psi_prime, fd, relative_error; "
         "inequality.samples: t, psi, rhs, slack"},
        {"negpower-deficit", "negpower_lab",
         "Star-shaped perturbations for |x|^p, p < 1-n: deficit sign, quadratic scaling, divergence bounds",
         "Stability for |x|^p with p < -n-1 and its divergence-theorem lower bound",
         "perturbations: seed, amplitude, deficit, deficit_error, symdiff, ratio_quant, divergence_bound, "
         "shell_bound, deficit_half, halving_ratio"},
        {"counterexample", "negpower_lab",
         "Ball unions accumulating at the origin: perimeter series U + tail against the lower bound L, origin "
         "density",
         "Counterexample when the origin is not a density-one point",
         "scan: r, upper, tail, lower, volume_partial, volume_bound, inequality_fails, constructible, separation, "
         "boundary_margin; density.density: rho, estimate, half_width, bound, candidates, tail_fraction"},
        {"divergence-probe", "negpower_lab",
         "Truncated |x|^p perimeter of boundaries through the origin: power-law or logarithmic divergence",
         "Divergence of P_p at boundary points through the origin",
         "truncated: delta, value, error"},
        {"weight-audit", "weights",
         "Hypothesis audit of a convex profile: evenness, convexity, derivative consistency",
         "Standing hypotheses on w (even, convex, C^3)",
         "profile: t, w, w1, w2"},
    };
    return catalog;
}

namespace {

bool known_experiment(const std::string& name) {
    const auto& c = list_experiments();
    return std::any_of(c.begin(), c.end(), [&](const CatalogEntry& e) { return e.name == name; });
}

std::vector<double> geometric(double first, double factor, int count) {
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(first * std::pow(factor, k));
    return v;
}

}  // namespace

ExperimentConfig resolve_config(const ExperimentConfig& in) {
    if (!known_experiment(in.experiment)) throw ArgumentError("unknown experiment '" + in.experiment + "'");
    ExperimentConfig c = in;
    const auto& x = c.experiment;
    auto weight = [&](std::string name, std::vector<double> params = {}) {
        if (c.weight.name.empty()) c.weight = {std::move(name), std::move(params)};
    };
    auto seeds = [&](int s) {
        if (c.seeds == 0) c.seeds = s;
    };
    auto samples = [&](int s) {
        if (c.samples == 0) c.samples = s;
    };
    if (x == "fuglede") {
        weight("square");
        seeds(50);
        if (c.amplitudes.empty()) c.amplitudes = {9e-3};
    } else if (x == "taylor-identities") {
        if (c.profiles.empty()) c.profiles = {"square", "cosh"};
        if (c.dims.empty()) c.dims = {2, 3};
        if (c.radii.empty()) c.radii = {0.5, 1.0, 2.0};
    } else if (x == "degenerate-ratio") {
        weight("flat-shoulder", {c.r});
        if (c.eps.empty()) c.eps = {0.1, 0.05, 0.02, 0.01};
    } else if (x == "ellipsoid-sharpness") {
        weight("square");
        if (c.ts.empty()) c.ts = geometric(0.1, 0.5, 8);
        if (c.resolution == 0) c.resolution = 64;
    } else if (x == "penalized-min") {
        weight("square");
        seeds(10);
        samples(100);
    } else if (x == "profile-checks") {
        weight("square");
        samples(100);
    } else if (x == "negpower-deficit") {
        weight("power", {-4.0});
        seeds(100);
        if (c.amplitudes.empty()) c.amplitudes = {1e-2};
    } else if (x == "counterexample") {
        weight("power", {-6.0});
        if (c.radii.empty()) c.radii = {0.1, 0.01, 0.001};
        if (c.rhos.empty()) c.rhos = {0.2, 0.1, 0.05, 0.02};
    } else if (x == "divergence-probe") {
        weight("power", {-4.0});
        if (c.deltas.empty()) c.deltas = geometric(1e-2, 0.1, 4);
    } else if (x == "weight-audit") {
        weight("square");
        samples(201);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

ExperimentReport run_fuglede(const ExperimentConfig& c) {
    const auto W = make_weight(c.weight);
    ExperimentReport rep("fuglede");
    for (std::size_t i = 0; i < c.amplitudes.size(); ++i) {
        FugledeSweepOptions o;
        o.seeds = c.seeds;
        o.seed = c.seed;
        o.amplitude = c.amplitudes[i];
        o.resolution = c.resolution;
        o.quantitative = c.quantitative;
        const auto sweep = fuglede_sweep(W, c.r, c.n, o);
        rep.merge(sweep, c.amplitudes.size() == 1 ? "" : "amplitude_" + std::to_string(i) + ".");
    }
    return rep;
}

ExperimentReport run_taylor(const ExperimentConfig& c) {
    ExperimentReport rep("taylor-identities");
    auto& tab = rep.add_table("identities", {"profile", "n", "r", "taylor_first", "taylor_second",
                                             "divergence_first", "divergence_second", "quadrature_error"});
    double taylor = 0.0, divergence = 0.0;
    for (std::size_t i = 0; i < c.profiles.size(); ++i) {
        const auto w = make_profile(c.profiles[i]);
        for (int n : c.dims) {
            for (double r : c.radii) {
                const auto t = taylor_coefficients(w, r, n);
                const auto d = divergence_identities(w, r, n);
                tab.add_row({static_cast<double>(i), static_cast<double>(n), r, t.residual_first,
                             t.residual_second, d.residual_first, d.residual_second,
                             std::max(t.quadrature_error, d.quadrature_error)});
                taylor = std::max({taylor, t.residual_first, t.residual_second});
                divergence = std::max({divergence, d.residual_first, d.residual_second});
            }
        }
    }
    rep.add_scalar("max_taylor_residual", taylor);
    rep.add_scalar("max_divergence_residual", divergence);
    rep.add_verdict("taylor_identities", taylor <= 1e-8,
                    "both coefficient identities to 1e-8 relative, worst " + format_short(taylor));
    rep.add_verdict("divergence_identities", divergence <= 1e-8,
                    "both ball identities to 1e-8 relative, worst " + format_short(divergence));
    return rep;
}

ExperimentReport run_degenerate(const ExperimentConfig& c) {
    const auto w = exp_profile(c.weight, c.experiment);
    ExperimentReport rep("degenerate-ratio");
    rep.add_scalar("w2_at_r", w.d2w(c.r));
    if (std::abs(w.d2w(c.r)) < 1e-12)
        rep.merge(degenerate_expansion_check(w, c.r, c.n), "expansion.");
    else
        rep.merge(expansion_check(w, c.r, c.n), "expansion.");
    rep.merge(translated_ball_scan(w, c.r, c.n, c.eps), "scan.");
    return rep;
}

ExperimentReport run_ellipsoid(const ExperimentConfig& c) {
    auto rep = ellipsoid_sharpness_scan(make_weight(c.weight), c.r, c.n, c.ts, c.resolution);
    return rep;
}

ExperimentReport run_penalized(const ExperimentConfig& c) {
    const auto w = exp_profile(c.weight, c.experiment);
    const auto F = PenalizedFunctional::at_thresholds(w, c.r, c.n, c.lambda_factor, c.penalty_alpha);
    ExperimentReport rep("penalized-min");
    const auto th = F.thresholds();
    rep.add_scalar("lambda1_min", th.lambda1_min);
    rep.add_scalar("lambda2_min", th.lambda2_min);
    rep.add_scalar("lambda1", F.lambda1);
    rep.add_scalar("lambda2", F.lambda2);
    rep.merge(radial_scan(F), "radial.");
    rep.merge(ball_minimality_check(F, c.samples, c.seed, 4, 0.2, c.resolution), "samples.");
    PenalizedRunOptions o;
    o.seeds = c.seeds;
    o.seed = c.seed;
    o.descent.resolution = c.resolution;
    rep.merge(penalized_descent(F, o), "descent.");
    return rep;
}

ExperimentReport run_profile(const ExperimentConfig& c) {
    const Profile P(make_weight(c.weight), c.n);
    ExperimentReport rep("profile-checks");
    const int m = c.samples;
    if (m < 1) throw ArgumentError("profile-checks needs samples >= 1");

    auto& inv = rep.add_table("inverse", {"s", "phi", "psi_phi", "relative_error"});
    double worst_inv = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double s = 3.0 * i / m;
        const double phi = P.phi(s);
        const double back = P.psi(phi);
        const double err = std::abs(back - s) / s;
        inv.add_row({s, phi, back, err});
        worst_inv = std::max(worst_inv, err);
    }
    rep.add_scalar("max_inverse_error", worst_inv);
    rep.add_verdict("psi_inverts_phi", worst_inv <= 1e-10,
                    "|Psi(Phi(s)) - s| / s <= 1e-10 on (0, 3], worst " + format_short(worst_inv));

    auto& der = rep.add_table("derivative", {"t", "psi_prime", "fd", "relative_error"});
    double worst_der = 0.0;
    constexpr double h = 1e-5;
    for (int i = 1; i <= m; ++i) {
        const double t = P.phi(3.0 * i / m);
        const double fd = (P.psi(t * (1 + h)) - P.psi(t * (1 - h))) / (2 * h * t);
        const double exact = P.psi_prime(t);
        const double err = std::abs(fd - exact) / std::abs(exact);
        der.add_row({t, exact, fd, err});
        worst_der = std::max(worst_der, err);
    }
    rep.add_scalar("max_derivative_error", worst_der);
    rep.add_verdict("psi_prime_identity", worst_der <= 1e-6,
                    "Psi' = 1 / (n omega_n Psi^{n-1} W(Psi)) against central differences to 1e-6, worst " +
                        format_short(worst_der));

    std::vector<double> ts;
    const double top = P.phi(3.0);
    for (int i = 1; i <= m; ++i) ts.push_back(top * i / m);
    rep.merge(check_profile_inequality(P, ts), "inequality.");
    return rep;
}

ExperimentReport run_negpower(const ExperimentConfig& c) {
    const double p = power_exponent(c.weight, c.experiment);
    ExperimentReport rep("negpower-deficit");
    for (std::size_t i = 0; i < c.amplitudes.size(); ++i) {
        NegpowerSweepOptions o;
        o.seeds = c.seeds;
        o.seed = c.seed;
        o.amplitude = c.amplitudes[i];
        o.resolution = c.resolution;
        rep.merge(negpower_sweep(p, c.r, c.n, o), c.amplitudes.size() == 1 ? "" : "amplitude_" + std::to_string(i) + ".");
    }
    return rep;
}

ExperimentReport run_counterexample(const ExperimentConfig& c) {
    const double p = power_exponent(c.weight, c.experiment);
    auto rep = counterexample_demo(c.n, p, c.alpha, c.radii, c.terms, c.seed);
    double smallest = std::numeric_limits<double>::infinity();
    for (double r : c.radii)
        if (r < std::pow(2.0, -c.alpha)) smallest = std::min(smallest, r);
    if (std::isfinite(smallest) && !c.rhos.empty()) {
        if (c.mc_samples < 0) throw ArgumentError("mc_samples must be non-negative");
        const auto U = build_counterexample(c.n, p, c.alpha, smallest, c.terms, c.seed);
        rep.add_scalar("density_union_r", smallest);
        rep.merge(origin_density_curve(U, c.rhos, static_cast<std::size_t>(c.mc_samples), c.seed), "density.");
    } else {
        rep.add_note("no constructible radius (r < 2^-alpha) or no rhos: origin density skipped");
    }
    return rep;
}

ExperimentReport run_probe(const ExperimentConfig& c) {
    const double p = power_exponent(c.weight, c.experiment);
    return divergence_probe(c.n, p, probe_shape_from_string(c.shape), c.deltas, c.outer, c.probe_radius);
}

ExperimentReport run_audit(const ExperimentConfig& c) {
    const auto w = exp_profile(c.weight, c.experiment);
    const auto grid = symmetric_grid(c.half_width, c.samples);
    auto rep = check_admissible(w, grid);
    auto& tab = rep.add_table("profile", {"t", "w", "w1", "w2"});
    for (double t : grid) tab.add_row({t, w.w(t), w.dw(t), w.d2w(t)});
    return rep;
}

ExperimentReport dispatch(const ExperimentConfig& c) {
    const auto& x = c.experiment;
    if (x == "fuglede") return run_fuglede(c);
    if (x == "taylor-identities") return run_taylor(c);
    if (x == "degenerate-ratio") return run_degenerate(c);
    if (x == "ellipsoid-sharpness") return run_ellipsoid(c);
    if (x == "penalized-min") return run_penalized(c);
    if (x == "profile-checks") return run_profile(c);
    if (x == "negpower-deficit") return run_negpower(c);
    if (x == "counterexample") return run_counterexample(c);
    if (x == "divergence-probe") return run_probe(c);
    if (x == "weight-audit") return run_audit(c);
    throw ArgumentError("unknown experiment '" + x + "'");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep(config.experiment);
    ExperimentConfig resolved = config;
    try {
        resolved = resolve_config(config);
        ExperimentReport inner = dispatch(resolved);
        rep.merge(inner, "");
    } catch (const Error& e) {
        rep.set_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        rep.set_error("internal", e.what());
    }
    rep.set_config(to_json(resolved));
    rep.set_elapsed_seconds(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return rep;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

std::filesystem::path output_directory(const ExperimentConfig& c) {
    if (!c.out.empty()) return c.out;
    const std::string name = c.experiment.empty() ? "run" : c.experiment;
    if (const char* root = std::getenv("WISO_OUT_ROOT"); root && *root) return std::filesystem::path(root) / name;
    return std::filesystem::path("wiso_out") / name;
}

void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& file, const std::string& text) {
        std::ofstream out(dir / file, std::ios::binary);
        if (!out) throw ArgumentError("cannot write " + (dir / file).string());
        out << text;
    };
    write("report.json", report.to_json().dump(2) + "\n");
    write("config.json", report.config().dump(2) + "\n");
    for (const auto& t : report.tables()) write(t.name + ".csv", t.to_csv());
}

int exit_code(const ExperimentReport& report) {
    if (report.has_error()) return 2;
    return report.passed() ? 0 : 1;
}

}  // namespace wiso
