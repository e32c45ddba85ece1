// femtopc command-line front end.
//
//   femtopc run --config <path> --out <dir> [--seed N] [--parallelism N] [--trace file]
//   femtopc preset --name fig2|fig3|fig4|fig5 [--run --out <dir> ...]
//   femtopc report --in <dir>
//
// FEMTOPC_OUT_DIR, when set, replaces the output directory of run/preset.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "femtopc/femtopc.hpp"

namespace {

std::filesystem::path resolve_out_dir(const std::string& flag)
{
    if (const char* env = std::getenv("FEMTOPC_OUT_DIR"); env && *env) return env;
    return flag;
}

int execute(femtopc::SweepSpec spec, const std::string& out_flag, std::optional<std::uint64_t> seed,
            unsigned parallelism, const std::string& trace)
{
    if (seed) spec.base.seed = *seed;
    femtopc::validate(spec);
    const auto out = resolve_out_dir(out_flag);
    if (out.empty()) {
        std::cerr << "error: no output directory (use --out or FEMTOPC_OUT_DIR)\n";
        return 2;
    }
    femtopc::SweepOptions opt;
    opt.parallelism = parallelism;
    opt.trace_path = trace;
    const auto result = femtopc::run_sweep(spec, opt);
    femtopc::write_outputs(result, out);
    std::cout << femtopc::summary_text(result, femtopc::aggregate(result));
    std::cout << "outputs written to " << out.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-tier CDMA uplink simulator with femtocell maximum-power control"};
    app.require_subcommand(1);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

    std::string config_path, out_dir, trace;
    std::optional<std::uint64_t> seed;
    unsigned parallelism = hw;
    auto* run = app.add_subcommand("run", "Run a scenario or sweep from a config file");
    run->add_option("--config", config_path, "Config file (key = value)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory")->required(false);
    run->add_option("--seed", seed, "Master seed (overrides the config)");
    run->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--trace", trace, "Per-frame trace of the first drop");

    std::string preset_name;
    bool preset_run = false;
    auto* preset = app.add_subcommand("preset", "Print (or run with --run) a figure preset");
    preset->add_option("--name", preset_name, "fig2, fig3, fig4 or fig5")->required();
    preset->add_flag("--run", preset_run, "Run the preset instead of printing it");
    preset->add_option("--out", out_dir, "Output directory for --run");
    preset->add_option("--seed", seed, "Master seed");
    preset->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
    preset->add_option("--trace", trace, "Per-frame trace of the first drop");

    std::string in_dir;
    auto* report = app.add_subcommand("report", "Re-aggregate drops.csv/users.csv of an output directory");
    report->add_option("--in", in_dir, "Output directory of a previous run")->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return execute(femtopc::load_config_file(config_path), out_dir, seed, parallelism, trace);
        }
        if (*preset) {
            auto spec = femtopc::fig_preset(preset_name);
            if (preset_run) {
                if (out_dir.empty()) out_dir = "out/" + preset_name;
                return execute(spec, out_dir, seed, parallelism, trace);
            }
            if (seed) spec.base.seed = *seed;
            std::cout << "# preset " << preset_name << ", plotted metric(s): " << femtopc::preset_metric(preset_name)
                      << "\n"
                      << femtopc::to_config_text(spec);
            return 0;
        }
        if (*report) {
            const auto result = femtopc::load_outputs(in_dir);
            const auto rows = femtopc::aggregate(result);
            const std::filesystem::path dir = in_dir;
            std::ofstream(dir / "results.csv") << femtopc::results_csv(rows);
            std::cout << femtopc::summary_text(result, rows);
            return 0;
        }
    } catch (const femtopc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
