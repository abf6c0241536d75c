#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "badam/config.hpp"
#include "badam/dataset.hpp"
#include "badam/diagnostics.hpp"
#include "badam/metrics.hpp"
#include "badam/mlp.hpp"

namespace badam {

// Fraction of test samples whose argmax over all 10 logits equals the label.
// Variational models evaluate at theta = mu.
double evaluate_single_headed(const MlpSpec& spec, std::span<const double> params,
                              const LabeledDataset& test);

// Same, restricted to test samples whose label is in `classes`; the argmax
// still runs over all 10 logits (single-headed).
double accuracy_on_classes(const MlpSpec& spec, std::span<const double> params,
                           const LabeledDataset& test, std::span<const int> classes);

struct SeedRunResult {
    MetricsTable table;
    std::vector<TraceRecord> trace;    // filled when trace_every > 0 on a variational method
    std::vector<double> final_sigma;   // variational methods only
    bool aborted = false;              // non-finite loss
};

// Train + evaluate one seed of cfg. Loads datasets itself; prefer
// run_experiment for seed sweeps (datasets are shared there).
SeedRunResult run_single_seed(const ExperimentConfig& cfg, std::uint64_t seed);

// Full protocol: every seed in cfg.seeds, parallel up to cfg.workers, rows
// sorted before return.
MetricsTable run_experiment(const ExperimentConfig& cfg);

// Adam vs BGD vs BAdam on the single-task benchmark, per-epoch checkpoints,
// same seeds. Explicit eta/sigma0 overrides apply to cfg.method only.
MetricsTable run_convergence_comparison(const ExperimentConfig& cfg);

// metrics.csv and summary.csv under out_dir (created if needed).
void write_metrics_outputs(const MetricsTable& table, const std::string& out_dir);

// Graduated-sampler probability trace (`index,p_task0,...`) for cfg's
// benchmark; requires a graduated benchmark.
void write_sampler_probe(const ExperimentConfig& cfg, const std::string& out_path);

struct SigmaDiagnosticsResult {
    double badam_iqr = 0.0;
    double bgd_iqr = 0.0;
    double badam_min_sigma = 0.0;
    double bgd_min_sigma = 0.0;
};

// End-of-training sigma comparison between BAdam and BGD on a split
// benchmark with sigma0 = 0.01; writes trace_{method}.csv and
// sigma_final_{method}.csv under cfg.out_dir.
SigmaDiagnosticsResult run_sigma_diagnostics(ExperimentConfig cfg);

}  // namespace badam
