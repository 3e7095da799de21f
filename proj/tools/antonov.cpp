// antonov: command-line front end.
//
//   antonov <solve|periods|spectrum|bounds|report|validate> --config PATH [--out DIR] [--threads N]
//           [--seed N] [--lambda-points P]
//
// Exit status: 0 success, 1 failed validation, 2 invalid configuration, 3 numerical failure.

#include "antonov/log.hpp"
#include "antonov/pipeline.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Antonov operator spectrum of isotropic self-gravitating steady states"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir;
    int threads = omp_get_num_procs();
    long seed = 0;
    int lambda_points = 0;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve", "solve the steady state; writes steady_state.csv/json"},
        {"periods", "radial frequency map; writes frequency_map.csv"},
        {"spectrum", "bands, eigencurves, modes and diagnostics"},
        {"bounds", "polytrope majorant and envelope; writes bounds.csv"},
        {"report", "full pipeline and report.json/report.txt"},
        {"validate", "check the configuration and the model hypotheses"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [outputs] directory)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "reserved; all methods are deterministic");
        sub->add_option("--lambda-points", lambda_points, "lambda grid size (overrides [grids] lambda_points)")
            ->check(CLI::Range(2, 100000));
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        antonov::log::init_from_env();
    } catch (const std::exception& e) {
        std::cerr << "error: ANTONOV_LOG: " << e.what() << "\n";
        return 2;
    }
    omp_set_num_threads(threads);

    antonov::RunConfig cfg;
    try {
        cfg = antonov::load_config(config_path);
    } catch (const antonov::ConfigError& e) {
        std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
        return 2;
    }
    if (lambda_points > 0) cfg.grids.lambda_points = lambda_points;
    const std::string dir = out_dir.empty() ? cfg.outputs.directory : out_dir;

    try {
        if (command == "validate") {
            const auto vs = antonov::validate_run(cfg);
            for (const auto& l : vs.lines) std::cout << l << "\n";
            return vs.ok ? 0 : 1;
        }
        std::cout << antonov::run_stage(command, cfg, dir);
    } catch (const antonov::StageError& e) {
        std::cerr << "numerical failure in " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
