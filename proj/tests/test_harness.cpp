#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "badam/config.hpp"
#include "badam/harness.hpp"
#include "badam/optimizers.hpp"
#include "badam/rng.hpp"
#include "badam/schedule.hpp"
#include "badam/variational.hpp"
#include "test_util.hpp"

using namespace badam;

TEST_CASE("config parsing") {
    const std::string text = R"(
# comment
method = badam
benchmark = split_mnist
seeds = 1..3
eta = 0.02
sigma0 = 0.011
batch_size = 128
arch = 784, 64, 10
grad_scale = sum
)";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.method == Method::badam);
    CHECK(cfg.benchmark == Benchmark::split_mnist);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(*cfg.eta == 0.02);
    CHECK(cfg.resolved_batch_size() == 128);
    CHECK(cfg.resolved_arch() == std::vector<std::size_t>{784, 64, 10});

    CHECK_THROWS_WITH_AS(parse_config("bogus_key = 1"), doctest::Contains("unknown key"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config("method = frobnicate"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("seeds = 9..2"), std::invalid_argument);
    CHECK(parse_seed_list("4,5,9") == std::vector<std::uint64_t>{4, 5, 9});
}

TEST_CASE("config table defaults match the benchmark protocols") {
    ExperimentConfig cfg;
    cfg.benchmark = Benchmark::split_mnist;
    cfg.method = Method::badam;
    CHECK(cfg.resolved_eta() == 0.01);
    CHECK(cfg.resolved_sigma0() == 0.011);
    CHECK(cfg.resolved_epochs() == 20);
    CHECK(cfg.resolved_batch_size() == 256);
    CHECK(cfg.resolved_eta(Method::bgd) == 1.0);
    CHECK(cfg.resolved_sigma0(Method::bgd) == 0.01);

    cfg.benchmark = Benchmark::split_fashion;
    CHECK(cfg.resolved_sigma0() == 0.005);
    CHECK(cfg.resolved_arch() == std::vector<std::size_t>{784, 200, 200, 200, 200, 10});

    cfg.benchmark = Benchmark::pmnist;
    CHECK(cfg.resolved_eta() == 0.1);
    CHECK(cfg.resolved_sigma0() == 0.01);
    CHECK(cfg.resolved_epochs() == 30);

    cfg.benchmark = Benchmark::grad_split_mnist;
    CHECK(cfg.resolved_eta() == 0.1);
    CHECK(cfg.resolved_eta(Method::bgd) == 10.0);
    CHECK(cfg.resolved_sigma0(Method::bgd) == 0.017);
    CHECK(cfg.resolved_batch_size() == 128);
    CHECK(cfg.resolved_epochs() == 1);
}

TEST_CASE("evaluate_single_headed on real mnist") {
    if (!test_util::has_mnist()) {
        MESSAGE("mnist data not found; skipping");
        return;
    }
    const LabeledDataset test = load_split(test_util::data_root(), "mnist", false);

    SUBCASE("all-zero network predicts class 0 everywhere: 980/10000") {
        const MlpSpec spec{{784, 16, 10}};
        const std::vector<double> params(param_count(spec), 0.0);
        CHECK(evaluate_single_headed(spec, params, test) == 980.0 / 10000.0);
    }
    SUBCASE("accuracy is invariant to test-set ordering") {
        const MlpSpec spec{{784, 16, 10}};
        Rng rng = make_rng(12);
        const std::vector<double> params = init_flat_params(spec, rng);
        const double acc = evaluate_single_headed(spec, params, test);

        LabeledDataset reversed;
        reversed.images = Tensor2D(test.size(), 784);
        reversed.labels.resize(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            const std::size_t j = test.size() - 1 - i;
            std::copy_n(test.images.row(j), 784, reversed.images.row(i));
            reversed.labels[i] = test.labels[j];
        }
        CHECK(evaluate_single_headed(spec, params, reversed) == acc);
    }
}

TEST_CASE("evaluate_single_headed: hand-built perfect memorizer") {
    // 10 samples, sample i lights pixel i; weights route pixel i to logit i.
    const MlpSpec spec{{784, 10}};
    std::vector<double> params(param_count(spec), 0.0);
    for (std::size_t c = 0; c < 10; ++c) params[c * 784 + c] = 5.0;

    LabeledDataset tiny;
    tiny.images = Tensor2D(10, 784);
    tiny.labels.resize(10);
    for (std::size_t i = 0; i < 10; ++i) {
        tiny.images(i, i) = 1.0;
        tiny.labels[i] = static_cast<int>(i);
    }
    CHECK(evaluate_single_headed(spec, params, tiny) == 1.0);
}

TEST_CASE("run_experiment: single-task sanity ceiling and determinism") {
    if (!test_util::has_mnist()) {
        MESSAGE("mnist data not found; skipping");
        return;
    }
    ExperimentConfig cfg;
    cfg.benchmark = Benchmark::single_task_convergence;
    cfg.method = Method::adam;
    cfg.seeds = {1};
    cfg.epochs = 3;
    cfg.arch = std::vector<std::size_t>{784, 32, 10};
    cfg.data_root = test_util::data_root();

    const MetricsTable table = run_experiment(cfg);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows.back().accuracy > 0.9);  // any method clears 0.9 with enough epochs
    for (const MetricsRow& r : table.rows) {
        CHECK(r.accuracy >= 0.0);
        CHECK(r.accuracy <= 1.0);
        CHECK(std::isfinite(r.mean_loss));
    }

    // Bit-identical reproduction.
    const MetricsTable again = run_experiment(cfg);
    REQUIRE(again.rows.size() == table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(again.rows[i].accuracy == table.rows[i].accuracy);
        CHECK(again.rows[i].mean_loss == table.rows[i].mean_loss);
        CHECK(again.rows[i].checkpoint == table.rows[i].checkpoint);
    }
}

TEST_CASE("run_experiment: variational path smoke test with checkpoints") {
    if (!test_util::has_mnist()) {
        MESSAGE("mnist data not found; skipping");
        return;
    }
    ExperimentConfig cfg;
    cfg.benchmark = Benchmark::grad_split_mnist;
    cfg.method = Method::badam;
    cfg.seeds = {3};
    cfg.mc_samples = 2;
    cfg.arch = std::vector<std::size_t>{784, 32, 10};
    cfg.checkpoints = 4;
    cfg.data_root = test_util::data_root();

    const MetricsTable table = run_experiment(cfg);
    REQUIRE(table.rows.size() == 4);  // 3 interior + final
    for (const MetricsRow& r : table.rows) {
        CHECK(r.accuracy >= 0.0);
        CHECK(r.accuracy <= 1.0);
    }
    CHECK(table.rows.back().checkpoint == 3);
}

TEST_CASE("run_experiment: non-finite loss aborts the seed with a diagnostic row") {
    if (!test_util::has_mnist()) {
        MESSAGE("mnist data not found; skipping");
        return;
    }
    ExperimentConfig cfg;
    cfg.benchmark = Benchmark::single_task_convergence;
    cfg.method = Method::bgd;
    cfg.sigma0 = 1e150;  // sampled logits overflow: loss is inf - inf on batch 1
    cfg.mc_samples = 1;
    cfg.seeds = {1, 2};
    cfg.epochs = 1;
    cfg.arch = std::vector<std::size_t>{784, 16, 10};
    cfg.data_root = test_util::data_root();
    cfg.workers = 2;

    const MetricsTable table = run_experiment(cfg);
    REQUIRE(table.rows.size() == 2);  // one diagnostic row per seed
    for (const MetricsRow& r : table.rows) {
        CHECK(r.checkpoint == -1);
        CHECK(r.accuracy == 0.0);
        CHECK(std::isnan(r.mean_loss));
    }
    CHECK(table.summarize().empty());  // aborted seeds are excluded
}

TEST_CASE("naive SGD forgets earlier split tasks (catastrophic forgetting signature)") {
    if (!test_util::has_mnist()) {
        MESSAGE("mnist data not found; skipping");
        return;
    }
    const LabeledDataset train = load_split(test_util::data_root(), "mnist", true);
    const LabeledDataset test = load_split(test_util::data_root(), "mnist", false);
    const std::vector<TaskDataset> tasks = split_by_classes(train, test, canonical_pairs());

    const MlpSpec spec{{784, 64, 10}};
    Rng rng = make_rng(1, {0x1a17});
    std::vector<double> params = init_flat_params(spec, rng);

    auto train_task = [&](std::size_t k) {
        DiscreteSchedule sched{std::span<const TaskDataset>(&tasks[k], 1), 2, 256};
        DiscreteBatchStream stream(sched, derive_seed(1, {0xb47c, k}));
        while (auto b = stream.next()) {
            const LossGrad lg = loss_and_grad(spec, params, b->x, b->labels);
            sgd_step(params, lg.grad, 0.1);
        }
    };

    train_task(0);
    const std::vector<int> task0_classes = {0, 1};
    const double acc_before = accuracy_on_classes(spec, params, test, task0_classes);
    CHECK(acc_before > 0.9);  // task 0 is learned

    train_task(1);
    const double acc_after = accuracy_on_classes(spec, params, test, task0_classes);
    CHECK(acc_after < 0.05);  // and catastrophically forgotten
}

TEST_CASE("metrics CSV outputs") {
    MetricsTable table;
    table.rows.push_back({"split_mnist", "badam", 2, 0, 0.5, 1.2, 3.0});
    table.rows.push_back({"split_mnist", "badam", 2, 1, 0.6, 1.1, 6.0});
    table.rows.push_back({"split_mnist", "badam", 1, 1, 0.4, 1.0, 5.5});
    table.rows.push_back({"split_mnist", "badam", 1, 0, 0.3, 1.4, 2.5});
    table.sort();
    CHECK(table.rows.front().seed == 1);
    CHECK(table.rows.front().checkpoint == 0);

    const auto summary = table.summarize();
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].n_seeds == 2);
    CHECK(summary[0].mean == doctest::Approx(0.5));  // (0.4 + 0.6) / 2
    CHECK(summary[0].stddev == doctest::Approx(std::sqrt(0.02)).epsilon(1e-9));

    const std::string dir = (std::filesystem::temp_directory_path() / "badam_test_out").string();
    write_metrics_outputs(table, dir);
    std::ifstream metrics(dir + "/metrics.csv");
    std::string header;
    std::getline(metrics, header);
    CHECK(header == "benchmark,method,seed,checkpoint,accuracy,mean_loss,wall_time_s");
    std::ifstream summary_in(dir + "/summary.csv");
    std::getline(summary_in, header);
    CHECK(header == "benchmark,method,mean,std,n_seeds");
}

TEST_CASE("sampler probe writes the figure trace") {
    if (!test_util::has_mnist()) {
        MESSAGE("mnist data not found; skipping");
        return;
    }
    ExperimentConfig cfg;
    cfg.benchmark = Benchmark::grad_split_mnist;
    cfg.data_root = test_util::data_root();
    const std::string path =
        (std::filesystem::temp_directory_path() / "badam_probe" / "probs.csv").string();
    write_sampler_probe(cfg, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,p_task0,p_task1,p_task2,p_task3,p_task4");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) lines += 1;
    CHECK(lines == 60000);

    ExperimentConfig bad = cfg;
    bad.benchmark = Benchmark::split_mnist;
    CHECK_THROWS_AS(write_sampler_probe(bad, path), std::invalid_argument);
}
