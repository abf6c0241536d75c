#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "badam/schedule.hpp"

using namespace badam;

namespace {

// Tasks with 2-pixel images whose first pixel encodes a unique sample id so
// multiset checks are easy.
std::vector<TaskDataset> synthetic_tasks(const std::vector<std::size_t>& sizes) {
    std::vector<TaskDataset> tasks(sizes.size());
    std::size_t uid = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        tasks[k].task_id = static_cast<int>(k);
        tasks[k].train.images = Tensor2D(sizes[k], 2);
        tasks[k].train.labels.resize(sizes[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i) {
            tasks[k].train.images(i, 0) = static_cast<double>(uid) * 1e-9;
            tasks[k].train.labels[i] = static_cast<int>(k % 10);
            uid += 1;
        }
    }
    return tasks;
}

std::vector<double> collect_ids(const Batch& b) {
    std::vector<double> ids(b.x.rows);
    for (std::size_t r = 0; r < b.x.rows; ++r) ids[r] = b.x(r, 0);
    return ids;
}

}  // namespace

TEST_CASE("discrete stream: batch count arithmetic") {
    // 20 epochs of a 12665-sample task at batch 256: 20 * ceil(12665/256) = 1000.
    const auto tasks = synthetic_tasks({12665, 300});
    const DiscreteSchedule sched{tasks, 20, 256};
    const auto bounds = task_boundary_steps(sched);
    CHECK(bounds[0] == 1000);
    CHECK(bounds[1] == 1000 + 20 * 2);

    DiscreteBatchStream stream(sched, 1);
    CHECK(stream.total_batches() == bounds.back());
}

TEST_CASE("discrete stream: one batch per task when batch covers the task") {
    const auto tasks = synthetic_tasks({40, 40});
    const DiscreteSchedule sched{tasks, 1, 40};
    DiscreteBatchStream stream(sched, 7);
    std::size_t count = 0;
    while (auto b = stream.next()) {
        CHECK(b->x.rows == 40);
        count += 1;
    }
    CHECK(count == 2);
}

TEST_CASE("discrete stream: tasks in order, no mixed batches, final short batch kept") {
    const auto tasks = synthetic_tasks({10, 7});
    const DiscreteSchedule sched{tasks, 2, 4};
    DiscreteBatchStream stream(sched, 3);

    int last_task = 0;
    std::size_t batches = 0;
    std::vector<std::size_t> rows_seen;
    while (auto b = stream.next()) {
        REQUIRE(b->task_id >= 0);  // never mixed
        CHECK(b->task_id >= last_task);
        last_task = b->task_id;
        rows_seen.push_back(b->x.rows);
        batches += 1;
    }
    // task 0: 2 epochs * (4+4+2), task 1: 2 epochs * (4+3)
    CHECK(batches == 6 + 4);
    CHECK(rows_seen == std::vector<std::size_t>{4, 4, 2, 4, 4, 2, 4, 3, 4, 3});
}

TEST_CASE("discrete stream: every epoch is a full pass (multiset equality)") {
    const auto tasks = synthetic_tasks({23});
    const DiscreteSchedule sched{tasks, 3, 5};
    DiscreteBatchStream stream(sched, 11);

    std::vector<double> ids;
    while (auto b = stream.next()) {
        const auto batch_ids = collect_ids(*b);
        ids.insert(ids.end(), batch_ids.begin(), batch_ids.end());
    }
    REQUIRE(ids.size() == 3 * 23);
    std::map<double, int> hist;
    for (double id : ids) hist[id] += 1;
    for (const auto& [id, count] : hist) CHECK(count == 3);
}

TEST_CASE("discrete stream: identical seed reproduces the stream") {
    const auto tasks = synthetic_tasks({50, 30});
    const DiscreteSchedule sched{tasks, 2, 16};
    DiscreteBatchStream a(sched, 99);
    DiscreteBatchStream b(sched, 99);
    while (true) {
        auto ba = a.next();
        auto bb = b.next();
        REQUIRE(ba.has_value() == bb.has_value());
        if (!ba) break;
        CHECK(ba->x.values == bb->x.values);
        CHECK(ba->labels == bb->labels);
    }
}

TEST_CASE("task_probabilities: simplex, peaks, and midpoint symmetry") {
    const auto tasks = synthetic_tasks({100, 100, 100});
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 16);
    REQUIRE(sched.total_samples == 300);
    REQUIRE(sched.centers == std::vector<double>{50.0, 150.0, 250.0});

    SUBCASE("probabilities sum to 1") {
        for (std::size_t i = 0; i < 300; i += 1) {
            const auto p = task_probabilities(sched, i);
            double sum = 0.0;
            for (double v : p) sum += v;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("each task's centre is its argmax") {
        for (std::size_t k = 0; k < 3; ++k) {
            const auto p = task_probabilities(sched, static_cast<std::size_t>(sched.centers[k]));
            const std::size_t arg =
                static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            CHECK(arg == k);
            for (std::size_t j = 0; j < 3; ++j) {
                if (j != k) CHECK(p[k] > p[j]);  // strict maximum
            }
        }
    }
    SUBCASE("midpoint between adjacent centers gets equal probabilities") {
        const auto p = task_probabilities(sched, 100);  // midpoint of 50 and 150
        CHECK(std::abs(p[0] - p[1]) < 1e-12);
        const auto q = task_probabilities(sched, 200);
        CHECK(std::abs(q[1] - q[2]) < 1e-12);
    }
    SUBCASE("out of range rejected") {
        CHECK_THROWS_AS(task_probabilities(sched, 300), std::invalid_argument);
    }
}

TEST_CASE("graduated stream: single task degenerates to one shuffled pass") {
    const auto tasks = synthetic_tasks({37});
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 8);
    GraduatedBatchStream stream(sched, 5);

    std::vector<double> ids;
    while (auto b = stream.next()) {
        CHECK(b->task_id == 0);
        const auto batch_ids = collect_ids(*b);
        ids.insert(ids.end(), batch_ids.begin(), batch_ids.end());
    }
    REQUIRE(ids.size() == 37);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < 37; ++i) {
        CHECK(ids[i] == doctest::Approx(static_cast<double>(i) * 1e-9));
    }
}

TEST_CASE("graduated stream: single-pass multiset equality over several tasks") {
    const auto tasks = synthetic_tasks({500, 400, 600});
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 128);
    GraduatedBatchStream stream(sched, 21);

    std::vector<double> ids;
    std::size_t batches = 0;
    while (auto b = stream.next()) {
        const auto batch_ids = collect_ids(*b);
        ids.insert(ids.end(), batch_ids.begin(), batch_ids.end());
        batches += 1;
    }
    CHECK(batches == stream.total_batches());
    REQUIRE(ids.size() == 1500);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < 1500; ++i) {
        CHECK(ids[i] == doctest::Approx(static_cast<double>(i) * 1e-9));
    }
}

TEST_CASE("graduated stream: empirical draw frequencies match the probabilities") {
    const auto tasks = synthetic_tasks({3000, 3000, 3000});
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 128);
    GraduatedBatchStream stream(sched, 1234);
    const std::vector<int>& drawn = stream.drawn_tasks();
    REQUIRE(drawn.size() == 9000);

    // 2000-index window centred on task 1's centre.
    const std::size_t centre = static_cast<std::size_t>(sched.centers[1]);
    const std::size_t begin = centre - 1000;
    const std::size_t end = centre + 1000;

    std::vector<double> expected(3, 0.0);
    std::vector<double> variance(3, 0.0);
    std::vector<double> observed(3, 0.0);
    for (std::size_t i = begin; i < end; ++i) {
        const auto p = task_probabilities(sched, i);
        for (std::size_t k = 0; k < 3; ++k) {
            expected[k] += p[k];
            variance[k] += p[k] * (1.0 - p[k]);
        }
        observed[static_cast<std::size_t>(drawn[i])] += 1.0;
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const double sd = std::sqrt(variance[k]);
        INFO("task ", k, ": observed ", observed[k], " expected ", expected[k], " sd ", sd);
        CHECK(std::abs(observed[k] - expected[k]) <= 3.0 * sd);
    }
}

TEST_CASE("graduated stream: identical seed reproduces the stream") {
    const auto tasks = synthetic_tasks({200, 300});
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 64);
    GraduatedBatchStream a(sched, 77);
    GraduatedBatchStream b(sched, 77);
    CHECK(a.drawn_tasks() == b.drawn_tasks());
    while (true) {
        auto ba = a.next();
        auto bb = b.next();
        REQUIRE(ba.has_value() == bb.has_value());
        if (!ba) break;
        CHECK(ba->x.values == bb->x.values);
    }
}

TEST_CASE("probability trace CSV has one row per sample index") {
    const auto tasks = synthetic_tasks({50, 50});
    const GraduatedSchedule sched = make_graduated_schedule(tasks, 16);
    std::ostringstream out;
    write_probability_trace(sched, out);
    const std::string text = out.str();
    const std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == 101);  // header + 100 rows
    CHECK(text.rfind("index,p_task0,p_task1", 0) == 0);
}
