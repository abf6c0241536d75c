#include "badam/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "badam/rng.hpp"

namespace badam {

namespace {

constexpr std::uint64_t kShuffleTag = 0x51f0;

Batch make_batch(std::span<const TaskDataset> tasks,
                 std::span<const std::pair<int, std::size_t>> items) {
    const std::size_t cols = tasks.front().train.images.cols;
    Batch b;
    b.x = Tensor2D(items.size(), cols);
    b.labels.resize(items.size());
    b.task_id = items.empty() ? -1 : items.front().first;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto [task, row] = items[i];
        const LabeledDataset& ds = tasks[static_cast<std::size_t>(task)].train;
        std::copy_n(ds.images.row(row), cols, b.x.row(i));
        b.labels[i] = ds.labels[row];
        if (task != b.task_id) b.task_id = -1;
    }
    return b;
}

}  // namespace

void DiscreteSchedule::validate() const {
    if (tasks.empty()) throw std::invalid_argument("DiscreteSchedule: no tasks");
    if (epochs_per_task < 1) throw std::invalid_argument("DiscreteSchedule: epochs_per_task >= 1");
    if (batch_size < 1) throw std::invalid_argument("DiscreteSchedule: batch_size >= 1");
}

std::vector<std::size_t> task_boundary_steps(const DiscreteSchedule& sched) {
    sched.validate();
    std::vector<std::size_t> bounds;
    std::size_t total = 0;
    for (const TaskDataset& t : sched.tasks) {
        const std::size_t per_epoch = (t.train.size() + sched.batch_size - 1) / sched.batch_size;
        total += per_epoch * sched.epochs_per_task;
        bounds.push_back(total);
    }
    return bounds;
}

DiscreteBatchStream::DiscreteBatchStream(const DiscreteSchedule& sched, std::uint64_t seed)
    : sched_(sched), seed_(seed) {
    sched_.validate();
    load_epoch();
}

void DiscreteBatchStream::load_epoch() {
    const std::size_t n = sched_.tasks[task_].train.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng = make_rng(seed_, {kShuffleTag, task_, epoch_});
    std::shuffle(order_.begin(), order_.end(), rng);
    pos_ = 0;
}

std::optional<Batch> DiscreteBatchStream::next() {
    while (pos_ >= order_.size()) {
        if (++epoch_ >= sched_.epochs_per_task) {
            epoch_ = 0;
            if (++task_ >= sched_.tasks.size()) return std::nullopt;
        }
        load_epoch();
    }
    const std::size_t take = std::min(sched_.batch_size, order_.size() - pos_);
    std::vector<std::pair<int, std::size_t>> items(take);
    for (std::size_t i = 0; i < take; ++i) {
        items[i] = {static_cast<int>(task_), order_[pos_ + i]};
    }
    pos_ += take;
    return make_batch(sched_.tasks, items);
}

std::size_t DiscreteBatchStream::total_batches() const {
    return task_boundary_steps(sched_).back();
}

void GraduatedSchedule::validate() const {
    if (tasks.empty()) throw std::invalid_argument("GraduatedSchedule: no tasks");
    if (batch_size < 1) throw std::invalid_argument("GraduatedSchedule: batch_size >= 1");
    if (centers.size() != tasks.size() || widths.size() != tasks.size()) {
        throw std::invalid_argument("GraduatedSchedule: centers/widths size mismatch");
    }
    for (std::size_t k = 1; k < centers.size(); ++k) {
        if (!(centers[k] > centers[k - 1])) {
            throw std::invalid_argument("GraduatedSchedule: centers must be strictly increasing");
        }
    }
    for (double w : widths) {
        if (!(w > 0.0)) throw std::invalid_argument("GraduatedSchedule: widths must be > 0");
    }
}

GraduatedSchedule make_graduated_schedule(std::span<const TaskDataset> tasks,
                                          std::size_t batch_size, double width_divisor) {
    if (!(width_divisor > 0.0)) {
        throw std::invalid_argument("make_graduated_schedule: width_divisor must be > 0");
    }
    GraduatedSchedule s;
    s.tasks = tasks;
    s.batch_size = batch_size;
    s.total_samples = 0;
    for (const TaskDataset& t : tasks) s.total_samples += t.train.size();
    const double span = static_cast<double>(s.total_samples) / static_cast<double>(tasks.size());
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        s.centers.push_back((static_cast<double>(k) + 0.5) * span);
        s.widths.push_back(static_cast<double>(tasks[k].train.size()) / width_divisor);
    }
    s.validate();
    return s;
}

std::vector<double> task_probabilities(const GraduatedSchedule& sched, std::size_t sample_index) {
    if (sample_index >= sched.total_samples) {
        throw std::invalid_argument("task_probabilities: sample_index out of range");
    }
    std::vector<double> p(sched.tasks.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double d = (static_cast<double>(sample_index) - sched.centers[k]) / sched.widths[k];
        p[k] = 1.0 / (1.0 + d * d);
        sum += p[k];
    }
    for (double& v : p) v /= sum;
    return p;
}

GraduatedBatchStream::GraduatedBatchStream(const GraduatedSchedule& sched, std::uint64_t seed)
    : sched_(&sched) {
    sched.validate();
    const std::size_t n_tasks = sched.tasks.size();

    // Per-task shuffled queues; every sample is emitted exactly once.
    std::vector<std::vector<std::size_t>> queues(n_tasks);
    std::vector<std::size_t> heads(n_tasks, 0);
    for (std::size_t k = 0; k < n_tasks; ++k) {
        queues[k].resize(sched.tasks[k].train.size());
        std::iota(queues[k].begin(), queues[k].end(), std::size_t{0});
        Rng rng = make_rng(seed, {kShuffleTag, k});
        std::shuffle(queues[k].begin(), queues[k].end(), rng);
    }

    Rng draw_rng = make_rng(seed, {0xd4a3});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    drawn_tasks_.reserve(sched.total_samples);
    order_.reserve(sched.total_samples);
    for (std::size_t i = 0; i < sched.total_samples; ++i) {
        std::vector<double> p = task_probabilities(sched, i);
        double live = 0.0;
        for (std::size_t k = 0; k < n_tasks; ++k) {
            if (heads[k] >= queues[k].size()) p[k] = 0.0;  // exhausted
            live += p[k];
        }
        // live > 0: at least one task still has samples while i < total.
        const double u = unit(draw_rng) * live;
        double acc = 0.0;
        std::size_t pick = 0;
        for (std::size_t k = 0; k < n_tasks; ++k) {
            acc += p[k];
            if (u < acc || k + 1 == n_tasks) {
                pick = k;
                break;
            }
        }
        while (heads[pick] >= queues[pick].size()) pick = (pick + 1) % n_tasks;
        drawn_tasks_.push_back(static_cast<int>(pick));
        order_.emplace_back(static_cast<int>(pick), queues[pick][heads[pick]++]);
    }
}

std::optional<Batch> GraduatedBatchStream::next() {
    if (pos_ >= order_.size()) return std::nullopt;
    const std::size_t take = std::min(sched_->batch_size, order_.size() - pos_);
    Batch b = make_batch(sched_->tasks,
                         std::span<const std::pair<int, std::size_t>>(order_).subspan(pos_, take));
    pos_ += take;
    return b;
}

std::size_t GraduatedBatchStream::total_batches() const {
    return (order_.size() + sched_->batch_size - 1) / sched_->batch_size;
}

void write_probability_trace(const GraduatedSchedule& sched, std::ostream& out) {
    out << "index";
    for (std::size_t k = 0; k < sched.tasks.size(); ++k) out << ",p_task" << k;
    out << "\n";
    for (std::size_t i = 0; i < sched.total_samples; ++i) {
        const std::vector<double> p = task_probabilities(sched, i);
        out << i;
        for (double v : p) out << "," << v;
        out << "\n";
    }
}

}  // namespace badam
