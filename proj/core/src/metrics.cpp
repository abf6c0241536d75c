#include "badam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace badam {

void MetricsTable::sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tie(a.benchmark, a.method, a.seed, a.checkpoint) <
               std::tie(b.benchmark, b.method, b.seed, b.checkpoint);
    });
}

std::vector<SummaryRow> MetricsTable::summarize() const {
    // (benchmark, method) -> seed -> accuracy at max checkpoint
    std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, std::pair<int, double>>>
        finals;
    for (const MetricsRow& r : rows) {
        if (r.checkpoint < 0) continue;  // aborted seed
        auto& per_seed = finals[{r.benchmark, r.method}];
        auto it = per_seed.find(r.seed);
        if (it == per_seed.end() || r.checkpoint > it->second.first) {
            per_seed[r.seed] = {r.checkpoint, r.accuracy};
        }
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, per_seed] : finals) {
        SummaryRow s;
        s.benchmark = key.first;
        s.method = key.second;
        s.n_seeds = per_seed.size();
        double sum = 0.0;
        for (const auto& [seed, cp_acc] : per_seed) sum += cp_acc.second;
        s.mean = sum / static_cast<double>(per_seed.size());
        double ss = 0.0;
        for (const auto& [seed, cp_acc] : per_seed) {
            ss += (cp_acc.second - s.mean) * (cp_acc.second - s.mean);
        }
        s.stddev = per_seed.size() > 1
                       ? std::sqrt(ss / static_cast<double>(per_seed.size() - 1))
                       : 0.0;
        out.push_back(std::move(s));
    }
    return out;
}

void MetricsTable::write_csv(std::ostream& out) const {
    out << "benchmark,method,seed,checkpoint,accuracy,mean_loss,wall_time_s\n";
    out.precision(17);
    for (const MetricsRow& r : rows) {
        out << r.benchmark << ',' << r.method << ',' << r.seed << ',' << r.checkpoint << ','
            << r.accuracy << ',' << r.mean_loss << ',' << r.wall_time_s << '\n';
    }
}

void MetricsTable::write_summary_csv(const std::vector<SummaryRow>& summary, std::ostream& out) {
    out << "benchmark,method,mean,std,n_seeds\n";
    out.precision(17);
    for (const SummaryRow& s : summary) {
        out << s.benchmark << ',' << s.method << ',' << s.mean << ',' << s.stddev << ','
            << s.n_seeds << '\n';
    }
}

void MetricsTable::append(const MetricsTable& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

}  // namespace badam
