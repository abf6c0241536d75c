#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "badam/config.hpp"
#include "badam/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string seeds;
    std::string out;
    std::size_t workers = 0;
};

badam::ExperimentConfig load_with_overrides(const CommonArgs& args) {
    badam::ExperimentConfig cfg = badam::load_config_file(args.config_path);
    if (!args.seeds.empty()) cfg.seeds = badam::parse_seed_list(args.seeds);
    if (!args.out.empty()) cfg.out_dir = args.out;
    if (args.workers > 0) cfg.workers = args.workers;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BAdam continual-learning benchmark harness"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run the configured experiment");
    run->add_option("--config", run_args.config_path, "Experiment config file")->required();
    run->add_option("--seeds", run_args.seeds, "Seed list override, e.g. 1..15 or 1,2,3");
    run->add_option("--out", run_args.out, "Output directory override");
    run->add_option("--workers", run_args.workers, "Parallel seed workers");

    CommonArgs probe_args;
    CLI::App* probe = app.add_subcommand(
        "probe-sampler", "Write the graduated sampler probability trace as CSV");
    probe->add_option("--config", probe_args.config_path, "Experiment config file")->required();
    probe->add_option("--out", probe_args.out, "Output CSV path")->required();

    CommonArgs diag_args;
    CLI::App* diag = app.add_subcommand(
        "diagnostics", "BAdam vs BGD sigma distribution and mu-magnitude traces");
    diag->add_option("--config", diag_args.config_path, "Experiment config file")->required();
    diag->add_option("--out", diag_args.out, "Output directory override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const badam::ExperimentConfig cfg = load_with_overrides(run_args);
            badam::MetricsTable table;
            if (cfg.benchmark == badam::Benchmark::single_task_convergence) {
                table = badam::run_convergence_comparison(cfg);
            } else {
                table = badam::run_experiment(cfg);
            }
            badam::write_metrics_outputs(table, cfg.out_dir);
            for (const badam::SummaryRow& s : table.summarize()) {
                std::cout << s.benchmark << " " << s.method << ": " << s.mean << " +- " << s.stddev
                          << " (n=" << s.n_seeds << ")\n";
            }
            std::cout << "wrote " << cfg.out_dir << "/metrics.csv and summary.csv\n";
        } else if (probe->parsed()) {
            badam::ExperimentConfig cfg = badam::load_config_file(probe_args.config_path);
            badam::write_sampler_probe(cfg, probe_args.out);
            std::cout << "wrote " << probe_args.out << "\n";
        } else if (diag->parsed()) {
            badam::ExperimentConfig cfg = load_with_overrides(diag_args);
            const badam::SigmaDiagnosticsResult r = badam::run_sigma_diagnostics(cfg);
            std::cout << "badam sigma IQR: " << r.badam_iqr << " (min " << r.badam_min_sigma
                      << ")\n";
            std::cout << "bgd   sigma IQR: " << r.bgd_iqr << " (min " << r.bgd_min_sigma << ")\n";
            std::cout << "wrote trace_*.csv and sigma_final_*.csv under " << cfg.out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
