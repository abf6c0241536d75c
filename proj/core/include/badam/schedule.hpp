#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "badam/dataset.hpp"
#include "badam/tensor.hpp"

namespace badam {

// One training batch. task_id is the source task for discrete schedules and
// -1 for graduated batches, which may mix tasks.
struct Batch {
    Tensor2D x;
    std::vector<int> labels;
    int task_id = -1;
};

// Tasks presented strictly in order; within each task, epochs_per_task full
// shuffled passes with the final short batch kept.
struct DiscreteSchedule {
    std::span<const TaskDataset> tasks;
    std::size_t epochs_per_task = 1;
    std::size_t batch_size = 1;

    void validate() const;
};

// Batch index (0-based, exclusive) at which each task ends; the harness
// evaluates at these boundaries.
std::vector<std::size_t> task_boundary_steps(const DiscreteSchedule& sched);

class DiscreteBatchStream {
  public:
    DiscreteBatchStream(const DiscreteSchedule& sched, std::uint64_t seed);
    std::optional<Batch> next();
    std::size_t total_batches() const;

  private:
    void load_epoch();

    DiscreteSchedule sched_;
    std::uint64_t seed_;
    std::size_t task_ = 0;
    std::size_t epoch_ = 0;
    std::size_t pos_ = 0;  // sample cursor within the shuffled epoch
    std::vector<std::size_t> order_;
};

// Single-pass stream over all tasks with per-index draw probabilities that
// peak at each task's centre and decay with squared distance, so adjacent
// tasks overlap around the boundaries.
struct GraduatedSchedule {
    std::span<const TaskDataset> tasks;
    std::size_t batch_size = 128;
    std::size_t total_samples = 0;
    std::vector<double> centers;   // global sample indices, strictly increasing
    std::vector<double> widths;    // distance scale per task

    void validate() const;
};

// centers default to midpoints of equal consecutive spans of [0, N);
// widths default to (task train size) / width_divisor.
GraduatedSchedule make_graduated_schedule(std::span<const TaskDataset> tasks,
                                          std::size_t batch_size, double width_divisor = 4.0);

// p_k proportional to 1 / (1 + d_k^2) with d_k = (i - centers[k]) / widths[k];
// normalized to sum to 1.
std::vector<double> task_probabilities(const GraduatedSchedule& sched, std::size_t sample_index);

class GraduatedBatchStream {
  public:
    GraduatedBatchStream(const GraduatedSchedule& sched, std::uint64_t seed);
    std::optional<Batch> next();
    std::size_t total_batches() const;

    // Task drawn at each global sample index; filled at construction.
    const std::vector<int>& drawn_tasks() const { return drawn_tasks_; }

  private:
    const GraduatedSchedule* sched_;
    std::vector<int> drawn_tasks_;
    std::vector<std::pair<int, std::size_t>> order_;  // (task, row) per global index
    std::size_t pos_ = 0;
};

// CSV trace `index,p_task0,...` over all sample indices.
void write_probability_trace(const GraduatedSchedule& sched, std::ostream& out);

}  // namespace badam
