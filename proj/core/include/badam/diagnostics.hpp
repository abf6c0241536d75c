#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "badam/variational.hpp"

namespace badam {

// Snapshot of the variational state: mean |mu| and sigma quantiles
// (q05, q25, q50, q75, q95).
struct TraceRecord {
    std::size_t step = 0;
    double mean_abs_mu = 0.0;
    std::array<double, 5> sigma_quantiles{};
};

TraceRecord record_trace(const VariationalParams& vp, std::size_t step);

struct SigmaHistogram {
    std::vector<double> bin_edges;      // n_bins + 1, spanning [min sigma, max sigma]
    std::vector<std::size_t> counts;    // n_bins; sums to the parameter count
};

SigmaHistogram sigma_histogram(const VariationalParams& vp, std::size_t n_bins);

// Linear-interpolation quantile over an unsorted sample.
double quantile(std::span<const double> values, double q);
double interquartile_range(std::span<const double> values);

// `step,mean_abs_mu,sig_q05,sig_q25,sig_q50,sig_q75,sig_q95`
void write_trace_csv(std::span<const TraceRecord> trace, std::ostream& out);

// Raw sigma values, one per line.
void write_sigma_csv(std::span<const double> sigma, std::ostream& out);

}  // namespace badam
