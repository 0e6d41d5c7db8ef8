// wisolab: run one experiment of the weighted-isoperimetry lab and write its
// report (JSON) and tables (CSV) to an output directory.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wiso/cli.hpp"
#include "wiso/core.hpp"

namespace {

std::string catalog_text(bool with_columns) {
    std::string s = "Experiments:\n";
    for (const auto& e : wiso::list_experiments()) {
        s += "  " + e.name + " [" + e.module + "]\n      " + e.description + "\n      anchor: " + e.anchor + "\n";
        if (with_columns) s += "      csv: " + e.csv_columns + "\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted isoperimetric inequality lab"};
    app.footer(catalog_text(true) +
               "\nOutput goes to --out, else the config's out, else $WISO_OUT_ROOT/<experiment>, else "
               "wiso_out/<experiment>.\nExit code: 0 all verdicts pass, 1 a verdict failed, 2 error.");

    std::string config_path, out_dir, experiment;
    std::optional<std::uint64_t> seed;
    std::optional<int> resolution;
    std::vector<std::string> sets;
    bool list = false, print_config = false, quiet = false;

    app.add_option("--config", config_path, "Config file (JSON or key = value)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Base seed");
    app.add_option("--resolution", resolution, "Sphere rule resolution (0 = default)");
    app.add_option("--experiment", experiment, "Experiment name (overrides the config)");
    app.add_option("--set", sets, "Extra key=value config entries, applied last");
    app.add_flag("--list", list, "List experiments and exit");
    app.add_flag("--print-config", print_config, "Print the resolved config as key = value and exit");
    app.add_flag("--quiet", quiet, "Only print the summary line");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        std::cout << catalog_text(false);
        return 0;
    }

    wiso::ExperimentConfig cfg;
    try {
        std::string text;
        if (!config_path.empty()) text = wiso::to_keyvalue(wiso::load_config(config_path));
        for (const auto& s : sets) text += s + "\n";
        if (!text.empty()) cfg = wiso::parse_config(text);
        if (!experiment.empty()) cfg.experiment = experiment;
        if (seed) cfg.seed = *seed;
        if (resolution) cfg.resolution = *resolution;
        if (!out_dir.empty()) cfg.out = out_dir;
        if (cfg.experiment.empty()) throw wiso::ArgumentError("no experiment given (use --experiment or --list)");
        if (print_config) {
            std::cout << wiso::to_keyvalue(wiso::resolve_config(cfg));
            return 0;
        }
    } catch (const wiso::Error& e) {
        std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
        return 2;
    }

    const auto report = wiso::run_experiment(cfg);
    const auto dir = wiso::output_directory(cfg);
    try {
        wiso::write_outputs(report, dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (!quiet) {
        for (const auto& v : report.verdicts())
            std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << "  " << v.detail << "\n";
        for (const auto& n : report.notes()) std::cout << "note: " << n << "\n";
    }
    const auto j = report.to_json();
    if (j.contains("error"))
        std::cout << "ERROR [" << j["error"]["kind"].get<std::string>() << "] "
                  << j["error"]["message"].get<std::string>() << "\n";
    std::printf("%s: %s in %.2f s, output in %s\n", report.name().c_str(),
                report.passed() ? "passed" : "FAILED", report.elapsed_seconds(), dir.string().c_str());
    return wiso::exit_code(report);
}
