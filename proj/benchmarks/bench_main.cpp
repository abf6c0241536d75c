#include <benchmark/benchmark.h>

#include "badam/mlp.hpp"
#include "badam/optimizers.hpp"
#include "badam/rng.hpp"
#include "badam/schedule.hpp"
#include "badam/variational.hpp"

using namespace badam;

namespace {

struct Fixture {
    MlpSpec spec{{784, 256, 256, 10}};
    std::vector<double> params;
    Tensor2D x{256, 784};
    std::vector<int> labels;

    Fixture() {
        Rng rng = make_rng(1);
        params = init_flat_params(spec, rng);
        fill_uniform(rng, x.values, 0.0, 1.0);
        labels.resize(256);
        std::uniform_int_distribution<int> lab(0, 9);
        for (int& y : labels) y = lab(rng);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

static void BM_forward_batch256(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(f.spec, f.params, f.x));
    }
}
BENCHMARK(BM_forward_batch256)->Unit(benchmark::kMillisecond);

static void BM_loss_and_grad_batch256(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_and_grad(f.spec, f.params, f.x, f.labels));
    }
}
BENCHMARK(BM_loss_and_grad_batch256)->Unit(benchmark::kMillisecond);

static void BM_mc_expectations_k10(benchmark::State& state) {
    Fixture& f = fixture();
    VariationalParams vp;
    vp.mu = f.params;
    vp.sigma.assign(f.params.size(), 0.011);
    std::uint64_t step = 0;
    for (auto _ : state) {
        Rng rng = make_rng(7, {step++});
        benchmark::DoNotOptimize(mc_expectations(f.spec, vp, f.x, f.labels, 10, rng));
    }
}
BENCHMARK(BM_mc_expectations_k10)->Unit(benchmark::kMillisecond);

static void BM_badam_mu_step(benchmark::State& state) {
    Fixture& f = fixture();
    std::vector<double> mu = f.params;
    std::vector<double> sigma(mu.size(), 0.011);
    std::vector<double> grad(mu.size(), 1e-3);
    BAdamState st = BAdamState::make(mu.size(), 0.01);
    for (auto _ : state) {
        badam_mu_step(mu, sigma, grad, st);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_badam_mu_step)->Unit(benchmark::kMillisecond);

static void BM_sigma_step(benchmark::State& state) {
    Fixture& f = fixture();
    std::vector<double> sigma(f.params.size(), 0.011);
    std::vector<double> geps(f.params.size(), 0.5);
    for (auto _ : state) {
        sigma_step(sigma, geps);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_sigma_step)->Unit(benchmark::kMillisecond);

static void BM_graduated_stream_build(benchmark::State& state) {
    std::vector<TaskDataset> tasks(5);
    for (std::size_t k = 0; k < 5; ++k) {
        tasks[k].task_id = static_cast<int>(k);
        tasks[k].train.images = Tensor2D(12000, 8);
        tasks[k].train.labels.assign(12000, static_cast<int>(k));
    }
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 128);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        GraduatedBatchStream stream(sched, seed++);
        benchmark::DoNotOptimize(stream.drawn_tasks().size());
    }
}
BENCHMARK(BM_graduated_stream_build)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
