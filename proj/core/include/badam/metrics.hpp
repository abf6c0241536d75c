#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace badam {

// One evaluation checkpoint. checkpoint == -1 flags a seed aborted on a
// non-finite loss (diagnostic row, accuracy forced to 0).
struct MetricsRow {
    std::string benchmark;
    std::string method;
    std::uint64_t seed = 0;
    int checkpoint = 0;
    double accuracy = 0.0;
    double mean_loss = 0.0;
    double wall_time_s = 0.0;
};

struct SummaryRow {
    std::string benchmark;
    std::string method;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n_seeds = 0;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;

    void sort();
    // Final-checkpoint accuracy per (benchmark, method): mean and sample
    // standard deviation across seeds. Aborted seeds are excluded.
    std::vector<SummaryRow> summarize() const;

    void write_csv(std::ostream& out) const;
    static void write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out);

    void append(const MetricsTable& other);
};

}  // namespace badam
