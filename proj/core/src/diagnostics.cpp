#include "badam/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace badam {

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double interquartile_range(std::span<const double> values) {
    return quantile(values, 0.75) - quantile(values, 0.25);
}

TraceRecord record_trace(const VariationalParams& vp, std::size_t step) {
    TraceRecord rec;
    rec.step = step;
    double sum_abs = 0.0;
    for (double m : vp.mu) sum_abs += std::abs(m);
    rec.mean_abs_mu = vp.mu.empty() ? 0.0 : sum_abs / static_cast<double>(vp.mu.size());

    std::vector<double> sorted(vp.sigma.begin(), vp.sigma.end());
    std::sort(sorted.begin(), sorted.end());
    const std::array<double, 5> qs = {0.05, 0.25, 0.50, 0.75, 0.95};
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double pos = qs[i] * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        rec.sigma_quantiles[i] = (lo + 1 >= sorted.size())
                                     ? sorted.back()
                                     : sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
    }
    return rec;
}

SigmaHistogram sigma_histogram(const VariationalParams& vp, std::size_t n_bins) {
    if (n_bins < 1) throw std::invalid_argument("sigma_histogram: n_bins must be >= 1");
    if (vp.sigma.empty()) throw std::invalid_argument("sigma_histogram: empty sigma");

    const auto [mn_it, mx_it] = std::minmax_element(vp.sigma.begin(), vp.sigma.end());
    const double mn = *mn_it;
    const double mx = *mx_it;

    SigmaHistogram h;
    h.bin_edges.resize(n_bins + 1);
    h.counts.assign(n_bins, 0);
    const double width = (mx - mn) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        h.bin_edges[i] = mn + width * static_cast<double>(i);
    }
    h.bin_edges.back() = mx;

    for (double s : vp.sigma) {
        std::size_t bin;
        if (width <= 0.0) {
            bin = 0;  // all values identical
        } else {
            bin = static_cast<std::size_t>((s - mn) / width);
            if (bin >= n_bins) bin = n_bins - 1;
        }
        h.counts[bin] += 1;
    }
    return h;
}

void write_trace_csv(std::span<const TraceRecord> trace, std::ostream& out) {
    out << "step,mean_abs_mu,sig_q05,sig_q25,sig_q50,sig_q75,sig_q95\n";
    out.precision(17);
    for (const TraceRecord& r : trace) {
        out << r.step << ',' << r.mean_abs_mu;
        for (double q : r.sigma_quantiles) out << ',' << q;
        out << '\n';
    }
}

void write_sigma_csv(std::span<const double> sigma, std::ostream& out) {
    out.precision(17);
    for (double s : sigma) out << s << '\n';
}

}  // namespace badam
