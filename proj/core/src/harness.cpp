#include "badam/harness.hpp"

#include <cblas.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "badam/optimizers.hpp"
#include "badam/rng.hpp"
#include "badam/schedule.hpp"
#include "badam/variational.hpp"

namespace badam {

namespace {

constexpr std::uint64_t kInitTag = 0x1a17;
constexpr std::uint64_t kStepTag = 0x57e9;
constexpr std::uint64_t kStreamTag = 0xb47c;
constexpr std::uint64_t kPermTag = 0x9e85;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared, immutable inputs for one benchmark.
struct BenchmarkData {
    LabeledDataset base_train;  // kept only for pmnist (per-seed permutations)
    LabeledDataset base_test;
    std::vector<TaskDataset> tasks;  // empty for pmnist
};

bool uses_fashion(Benchmark b) {
    return b == Benchmark::split_fashion || b == Benchmark::grad_split_fashion;
}

BenchmarkData load_benchmark_data(const ExperimentConfig& cfg) {
    BenchmarkData data;
    const std::string name = uses_fashion(cfg.benchmark) ? "fashion" : "mnist";
    LabeledDataset train = load_split(cfg.data_root, name, true);
    data.base_test = load_split(cfg.data_root, name, false);

    switch (cfg.benchmark) {
        case Benchmark::split_mnist:
        case Benchmark::split_fashion:
        case Benchmark::grad_split_mnist:
        case Benchmark::grad_split_fashion:
            data.tasks = split_by_classes(train, data.base_test, canonical_pairs());
            break;
        case Benchmark::single_task_convergence: {
            TaskDataset whole;
            whole.task_id = 0;
            whole.train = std::move(train);
            whole.test = data.base_test;
            data.tasks.push_back(std::move(whole));
            break;
        }
        case Benchmark::pmnist:
            data.base_train = std::move(train);
            break;
    }
    return data;
}

// One model + optimizer state; applies one update per batch.
class Trainer {
  public:
    Trainer(const MlpSpec& spec, const ExperimentConfig& cfg, std::uint64_t seed)
        : spec_(&spec),
          method_(cfg.method),
          scale_(cfg.grad_scale),
          mc_samples_(cfg.mc_samples),
          seed_(seed) {
        Rng init_rng = make_rng(seed, {kInitTag});
        const double eta = cfg.resolved_eta();
        switch (method_) {
            case Method::sgd:
                params_ = init_flat_params(spec, init_rng);
                sgd_eta_ = eta;
                break;
            case Method::adam:
                params_ = init_flat_params(spec, init_rng);
                moments_ = MomentState::make(params_.size(), eta, cfg.beta1, cfg.beta2, cfg.gamma);
                break;
            case Method::bgd:
                vp_ = init_variational(spec, cfg.resolved_sigma0(), init_rng);
                bgd_.eta = eta;
                break;
            case Method::badam:
                vp_ = init_variational(spec, cfg.resolved_sigma0(), init_rng);
                moments_ = MomentState::make(vp_.size(), eta, cfg.beta1, cfg.beta2, cfg.gamma);
                break;
        }
    }

    // Returns the mean-reduced batch loss (mean over MC draws for the
    // variational methods).
    double step(const Batch& batch) {
        double loss = 0.0;
        switch (method_) {
            case Method::sgd: {
                LossGrad lg = loss_and_grad(*spec_, params_, batch.x, batch.labels);
                sgd_step(params_, lg.grad, sgd_eta_);
                loss = lg.loss;
                break;
            }
            case Method::adam: {
                LossGrad lg = loss_and_grad(*spec_, params_, batch.x, batch.labels);
                adam_step(params_, lg.grad, moments_);
                loss = lg.loss;
                break;
            }
            case Method::bgd:
            case Method::badam: {
                Rng rng = make_rng(seed_, {kStepTag, global_step_});
                McEstimate est =
                    mc_expectations(*spec_, vp_, batch.x, batch.labels, mc_samples_, rng);
                if (scale_ == GradScale::sum) {
                    const double f = static_cast<double>(batch.x.rows);
                    for (double& g : est.e_g) g *= f;
                    for (double& g : est.e_g_eps) g *= f;
                }
                // Both updates read the pre-update (mu, sigma): the mu step
                // does not touch sigma, so ordering mu-then-sigma keeps the
                // prior values visible to each rule.
                if (method_ == Method::badam) {
                    badam_mu_step(vp_.mu, vp_.sigma, est.e_g, moments_);
                } else {
                    bgd_mu_step(vp_.mu, vp_.sigma, est.e_g, bgd_);
                }
                sigma_step(vp_.sigma, est.e_g_eps);
                loss = est.mean_loss;
                break;
            }
        }
        global_step_ += 1;
        return loss;
    }

    std::span<const double> eval_params() const {
        return is_variational() ? std::span<const double>(vp_.mu)
                                : std::span<const double>(params_);
    }
    bool is_variational() const { return method_ == Method::bgd || method_ == Method::badam; }
    const VariationalParams& variational() const { return vp_; }
    std::size_t steps_taken() const { return global_step_; }

  private:
    const MlpSpec* spec_;
    Method method_;
    GradScale scale_;
    std::size_t mc_samples_;
    std::uint64_t seed_;
    std::size_t global_step_ = 0;

    std::vector<double> params_;
    MomentState moments_;
    VariationalParams vp_;
    BgdConfig bgd_;
    double sgd_eta_ = 0.1;
};

// Accumulates rows for one seed; tracks the loss window between checkpoints.
struct SeedRecorder {
    const ExperimentConfig* cfg;
    std::uint64_t seed;
    Clock::time_point start = Clock::now();
    MetricsTable table;
    double loss_sum = 0.0;
    std::size_t loss_count = 0;

    void add_loss(double loss) {
        loss_sum += loss;
        loss_count += 1;
    }

    void checkpoint(int id, double accuracy) {
        MetricsRow row;
        row.benchmark = to_string(cfg->benchmark);
        row.method = to_string(cfg->method);
        row.seed = seed;
        row.checkpoint = id;
        row.accuracy = accuracy;
        row.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count)
                                       : std::numeric_limits<double>::quiet_NaN();
        row.wall_time_s = seconds_since(start);
        table.rows.push_back(std::move(row));
        loss_sum = 0.0;
        loss_count = 0;
    }

    void abort_row() {
        MetricsRow row;
        row.benchmark = to_string(cfg->benchmark);
        row.method = to_string(cfg->method);
        row.seed = seed;
        row.checkpoint = -1;
        row.accuracy = 0.0;
        row.mean_loss = std::numeric_limits<double>::quiet_NaN();
        row.wall_time_s = seconds_since(start);
        table.rows.push_back(std::move(row));
    }
};

struct TraceSink {
    std::size_t every = 0;
    std::vector<TraceRecord>* out = nullptr;

    void observe(const Trainer& trainer) {
        if (every == 0 || out == nullptr || !trainer.is_variational()) return;
        const std::size_t step = trainer.steps_taken();
        if (step % every == 0) {
            out->push_back(record_trace(trainer.variational(), step));
        }
    }
};

// Runs `epochs` shuffled passes over one task. Returns false when a
// non-finite loss aborted the seed.
bool train_on_task(Trainer& trainer, const TaskDataset& task, std::size_t epochs,
                   std::size_t batch_size, std::uint64_t stream_seed, SeedRecorder& rec,
                   TraceSink& trace) {
    DiscreteSchedule sched{std::span<const TaskDataset>(&task, 1), epochs, batch_size};
    DiscreteBatchStream stream(sched, stream_seed);
    while (auto batch = stream.next()) {
        const double loss = trainer.step(*batch);
        if (!std::isfinite(loss)) {
            rec.abort_row();
            return false;
        }
        rec.add_loss(loss);
        trace.observe(trainer);
    }
    return true;
}

SeedRunResult run_seed_impl(const ExperimentConfig& cfg, std::uint64_t seed,
                            const BenchmarkData& data) {
    const std::vector<std::size_t> widths = cfg.resolved_arch();
    MlpSpec spec{widths};
    spec.validate();

    Trainer trainer(spec, cfg, seed);
    SeedRunResult result;
    SeedRecorder rec;
    rec.cfg = &cfg;
    rec.seed = seed;
    TraceSink trace{cfg.trace_every, &result.trace};
    trace.observe(trainer);  // initial state at step 0

    const std::size_t batch_size = cfg.resolved_batch_size();
    const std::size_t epochs = cfg.resolved_epochs();

    switch (cfg.benchmark) {
        case Benchmark::split_mnist:
        case Benchmark::split_fashion: {
            for (std::size_t k = 0; k < data.tasks.size(); ++k) {
                if (!train_on_task(trainer, data.tasks[k], epochs, batch_size,
                                   derive_seed(seed, {kStreamTag, k}), rec, trace)) {
                    result.aborted = true;
                    break;
                }
                rec.checkpoint(static_cast<int>(k),
                               evaluate_single_headed(spec, trainer.eval_params(), data.base_test));
            }
            break;
        }
        case Benchmark::single_task_convergence: {
            for (std::size_t e = 0; e < epochs; ++e) {
                if (!train_on_task(trainer, data.tasks.front(), 1, batch_size,
                                   derive_seed(seed, {kStreamTag, 0, e}), rec, trace)) {
                    result.aborted = true;
                    break;
                }
                rec.checkpoint(static_cast<int>(e),
                               evaluate_single_headed(spec, trainer.eval_params(), data.base_test));
            }
            break;
        }
        case Benchmark::pmnist: {
            // Task k uses a pixel permutation derived from (seed, k); task 0
            // is unpermuted. Test sets are permuted on demand at evaluation.
            std::vector<std::vector<std::size_t>> perms(cfg.pmnist_tasks);
            for (std::size_t k = 0; k < cfg.pmnist_tasks; ++k) {
                if (k == 0) {
                    perms[k] = identity_permutation(data.base_train.images.cols);
                } else {
                    Rng rng = make_rng(seed, {kPermTag, k});
                    perms[k] = random_permutation(data.base_train.images.cols, rng);
                }
            }
            auto eval_all_tasks = [&]() {
                double sum = 0.0;
                for (std::size_t t = 0; t < perms.size(); ++t) {
                    const LabeledDataset test_t = permute_pixels(data.base_test, perms[t]);
                    sum += evaluate_single_headed(spec, trainer.eval_params(), test_t);
                }
                return sum / static_cast<double>(perms.size());
            };
            for (std::size_t k = 0; k < cfg.pmnist_tasks; ++k) {
                TaskDataset task;
                task.task_id = static_cast<int>(k);
                task.train = permute_pixels(data.base_train, perms[k]);
                if (!train_on_task(trainer, task, epochs, batch_size,
                                   derive_seed(seed, {kStreamTag, k}), rec, trace)) {
                    result.aborted = true;
                    break;
                }
                rec.checkpoint(static_cast<int>(k), eval_all_tasks());
            }
            break;
        }
        case Benchmark::grad_split_mnist:
        case Benchmark::grad_split_fashion: {
            const GraduatedSchedule sched =
                make_graduated_schedule(data.tasks, batch_size, cfg.width_divisor);
            GraduatedBatchStream stream(sched, derive_seed(seed, {kStreamTag}));
            const std::size_t total = stream.total_batches();
            const std::size_t n_checkpoints = cfg.checkpoints;
            std::size_t batch_index = 0;
            std::size_t next_checkpoint = 0;
            while (auto batch = stream.next()) {
                const double loss = trainer.step(*batch);
                if (!std::isfinite(loss)) {
                    rec.abort_row();
                    result.aborted = true;
                    break;
                }
                rec.add_loss(loss);
                trace.observe(trainer);
                batch_index += 1;
                // Interior checkpoints at i/n of the stream, final at the end.
                while (next_checkpoint + 1 < n_checkpoints &&
                       batch_index * n_checkpoints >= (next_checkpoint + 1) * total) {
                    rec.checkpoint(static_cast<int>(next_checkpoint),
                                   evaluate_single_headed(spec, trainer.eval_params(),
                                                          data.base_test));
                    next_checkpoint += 1;
                }
            }
            if (!result.aborted) {
                rec.checkpoint(static_cast<int>(n_checkpoints - 1),
                               evaluate_single_headed(spec, trainer.eval_params(), data.base_test));
            }
            break;
        }
    }

    if (trainer.is_variational()) {
        result.final_sigma = trainer.variational().sigma;
    }
    result.table = std::move(rec.table);
    return result;
}

void set_blas_threads(std::size_t workers) {
    // One BLAS thread per worker when seeds run in parallel; otherwise let
    // OpenBLAS use the machine.
    openblas_set_num_threads(workers > 1 ? 1 : openblas_get_num_procs());
}

}  // namespace

double evaluate_single_headed(const MlpSpec& spec, std::span<const double> params,
                              const LabeledDataset& test) {
    const std::size_t chunk = 1000;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < test.size(); begin += chunk) {
        const std::size_t n = std::min(chunk, test.size() - begin);
        Tensor2D x(n, test.images.cols);
        std::copy_n(test.images.row(begin), n * test.images.cols, x.data());
        const Tensor2D logits = forward(spec, params, x);
        for (std::size_t r = 0; r < n; ++r) {
            const double* row = logits.row(r);
            std::size_t arg = 0;
            for (std::size_t c = 1; c < logits.cols; ++c) {
                if (row[c] > row[arg]) arg = c;
            }
            if (static_cast<int>(arg) == test.labels[begin + r]) correct += 1;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

double accuracy_on_classes(const MlpSpec& spec, std::span<const double> params,
                           const LabeledDataset& test, std::span<const int> classes) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (std::find(classes.begin(), classes.end(), test.labels[i]) != classes.end()) {
            rows.push_back(i);
        }
    }
    if (rows.empty()) throw std::invalid_argument("accuracy_on_classes: no samples in classes");
    Tensor2D x(rows.size(), test.images.cols);
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy_n(test.images.row(rows[i]), test.images.cols, x.row(i));
        labels[i] = test.labels[rows[i]];
    }
    const Tensor2D logits = forward(spec, params, x);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double* row = logits.row(r);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < logits.cols; ++c) {
            if (row[c] > row[arg]) arg = c;
        }
        if (static_cast<int>(arg) == labels[r]) correct += 1;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

SeedRunResult run_single_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const BenchmarkData data = load_benchmark_data(cfg);
    return run_seed_impl(cfg, seed, data);
}

MetricsTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const BenchmarkData data = load_benchmark_data(cfg);
    const std::size_t n = cfg.seeds.size();
    const std::size_t workers = std::min(cfg.workers, n);
    set_blas_threads(workers);

    std::vector<SeedRunResult> results(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                results[i] = run_seed_impl(cfg, cfg.seeds[i], data);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    MetricsTable table;
    for (SeedRunResult& r : results) table.append(r.table);
    table.sort();
    return table;
}

MetricsTable run_convergence_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    MetricsTable table;
    for (Method m : {Method::adam, Method::bgd, Method::badam}) {
        ExperimentConfig sub = cfg;
        sub.benchmark = Benchmark::single_task_convergence;
        if (m != cfg.method) {
            sub.eta.reset();
            sub.sigma0.reset();
        }
        sub.method = m;
        table.append(run_experiment(sub));
    }
    table.sort();
    return table;
}

void write_metrics_outputs(const MetricsTable& table, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/metrics.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/metrics.csv");
        table.write_csv(out);
    }
    {
        std::ofstream out(out_dir + "/summary.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/summary.csv");
        MetricsTable::write_summary_csv(table.summarize(), out);
    }
}

void write_sampler_probe(const ExperimentConfig& cfg, const std::string& out_path) {
    cfg.validate();
    if (cfg.benchmark != Benchmark::grad_split_mnist &&
        cfg.benchmark != Benchmark::grad_split_fashion) {
        throw std::invalid_argument("sampler probe requires a graduated benchmark");
    }
    const BenchmarkData data = load_benchmark_data(cfg);
    const GraduatedSchedule sched =
        make_graduated_schedule(data.tasks, cfg.resolved_batch_size(), cfg.width_divisor);
    const auto parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_probability_trace(sched, out);
}

SigmaDiagnosticsResult run_sigma_diagnostics(ExperimentConfig cfg) {
    if (cfg.benchmark != Benchmark::split_mnist && cfg.benchmark != Benchmark::split_fashion) {
        cfg.benchmark = Benchmark::split_mnist;
    }
    if (cfg.trace_every == 0) cfg.trace_every = 50;
    cfg.validate();

    const BenchmarkData data = load_benchmark_data(cfg);
    set_blas_threads(1);
    const std::uint64_t seed = cfg.seeds.front();

    SigmaDiagnosticsResult result;
    std::filesystem::create_directories(cfg.out_dir);
    for (Method m : {Method::badam, Method::bgd}) {
        ExperimentConfig sub = cfg;
        sub.method = m;
        sub.eta.reset();
        sub.sigma0 = 0.01;  // Figure-style protocol: both methods start at 0.01
        const SeedRunResult run = run_seed_impl(sub, seed, data);

        const std::string tag = to_string(m);
        {
            std::ofstream out(cfg.out_dir + "/trace_" + tag + ".csv");
            write_trace_csv(run.trace, out);
        }
        {
            std::ofstream out(cfg.out_dir + "/sigma_final_" + tag + ".csv");
            write_sigma_csv(run.final_sigma, out);
        }
        const double iqr = interquartile_range(run.final_sigma);
        const double mn = *std::min_element(run.final_sigma.begin(), run.final_sigma.end());
        if (m == Method::badam) {
            result.badam_iqr = iqr;
            result.badam_min_sigma = mn;
        } else {
            result.bgd_iqr = iqr;
            result.bgd_min_sigma = mn;
        }
    }
    return result;
}

}  // namespace badam
