#pragma once

// Experiment runner: a typed configuration (JSON or key = value text), the
// experiment catalog, dispatch to the library, and deterministic output files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "wiso/report.hpp"
#include "wiso/weights.hpp"

namespace wiso {

struct WeightSpec {
    /// "zero", "square", "cosh", "flat-shoulder" (params {r0}) or "power"
    /// (params {p}). Empty selects the experiment default.
    std::string name;
    std::vector<double> params;

    bool operator==(const WeightSpec&) const = default;
};

/// Builds the weight; throws ArgumentError for unknown names or missing params.
RadialWeight make_weight(const WeightSpec& spec);

struct ExperimentConfig {
    std::string experiment;
    WeightSpec weight;
    int n = 2;
    double r = 1.0;
    int resolution = 0;
    int seeds = 0;
    std::uint64_t seed = 1;
    /// Grid of the taylor-identities experiment.
    std::vector<std::string> profiles;
    std::vector<int> dims;
    /// Radii: identity grid, or counterexample scale parameters.
    std::vector<double> radii;
    std::vector<double> eps;
    std::vector<double> amplitudes;
    std::vector<double> ts;
    std::vector<double> deltas;
    std::vector<double> rhos;
    /// Point count of sampled checks (profile, penalized, weight audit).
    int samples = 0;
    bool quantitative = false;
    double alpha = 8.0;
    int terms = 100;
    std::int64_t mc_samples = 100000;
    double lambda_factor = 1.0;
    double penalty_alpha = 0.0;
    std::string shape = "tangent-sphere";
    double outer = 0.5;
    double probe_radius = 1.0;
    double half_width = 3.0;
    std::string out;

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::ordered_json to_json(const ExperimentConfig& c);
/// Unknown keys and ill-typed values throw ArgumentError.
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);

/// One `key = value` per line; nested keys use dots (weight.name), lists are
/// comma separated, '#' starts a comment.
std::string to_keyvalue(const ExperimentConfig& c);
ExperimentConfig config_from_keyvalue(const std::string& text);

/// Parses text that starts with '{' as JSON, anything else as key = value.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fills every empty or zero field with the experiment's default, so the
/// embedded config reproduces the run. Throws ArgumentError for unknown
/// experiments.
ExperimentConfig resolve_config(const ExperimentConfig& c);

struct CatalogEntry {
    std::string name;
    std::string module;
    std::string description;
    std::string anchor;
    /// Tables written as CSV, with their columns.
    std::string csv_columns;
};
const std::vector<CatalogEntry>& list_experiments();

/// Resolves the config and runs the experiment. Library errors are caught
/// and stored in the report (kind and message); the report then fails.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// report.json, config.json and one <table>.csv per table into `dir`.
void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

/// `out` when set, else $WISO_OUT_ROOT/<experiment>, else wiso_out/<experiment>.
std::filesystem::path output_directory(const ExperimentConfig& c);

/// 0 when every verdict passed, 1 when a verdict failed, 2 on an error.
int exit_code(const ExperimentReport& report);

}  // namespace wiso
