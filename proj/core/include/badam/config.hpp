#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace badam {

enum class Method { sgd, adam, bgd, badam };
enum class Benchmark {
    split_mnist,
    split_fashion,
    pmnist,
    grad_split_mnist,
    grad_split_fashion,
    single_task_convergence
};

// How Monte-Carlo gradient estimates are scaled before the variational
// updates. `sum` multiplies the mean-reduced estimates by the batch size,
// matching the likelihood-of-the-batch reading of the loss; `mean` leaves
// them as-is.
enum class GradScale { mean, sum };

std::string to_string(Method m);
std::string to_string(Benchmark b);
std::string to_string(GradScale s);
Method method_from_string(const std::string& s);
Benchmark benchmark_from_string(const std::string& s);
GradScale grad_scale_from_string(const std::string& s);

struct ExperimentConfig {
    Method method = Method::badam;
    Benchmark benchmark = Benchmark::split_mnist;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};

    // Unset fields fall back to the per-benchmark / per-method defaults
    // (resolved_* accessors).
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> eta;
    std::optional<double> sigma0;
    std::optional<std::vector<std::size_t>> arch;

    std::size_t mc_samples = 10;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double gamma = 1e-8;

    std::string data_root = "data";
    std::string out_dir = "out";
    std::size_t workers = 1;
    GradScale grad_scale = GradScale::sum;

    std::size_t pmnist_tasks = 10;
    double width_divisor = 4.0;
    std::size_t trace_every = 0;    // 0 disables trace records
    std::size_t checkpoints = 10;   // graduated runs: evenly spaced + final

    void validate() const;
    std::size_t resolved_epochs() const;
    std::size_t resolved_batch_size() const;
    double resolved_eta() const;       // per-benchmark method default
    double resolved_eta(Method m) const;
    double resolved_sigma0() const;
    double resolved_sigma0(Method m) const;
    std::vector<std::size_t> resolved_arch() const;
};

// Flat `key = value` document; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Seed list syntax: "a..b" (inclusive range) or "a,b,c".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace badam
