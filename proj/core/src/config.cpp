#include "badam/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace badam {

std::string to_string(Method m) {
    switch (m) {
        case Method::sgd: return "sgd";
        case Method::adam: return "adam";
        case Method::bgd: return "bgd";
        case Method::badam: return "badam";
    }
    return "?";
}

std::string to_string(Benchmark b) {
    switch (b) {
        case Benchmark::split_mnist: return "split_mnist";
        case Benchmark::split_fashion: return "split_fashion";
        case Benchmark::pmnist: return "pmnist";
        case Benchmark::grad_split_mnist: return "grad_split_mnist";
        case Benchmark::grad_split_fashion: return "grad_split_fashion";
        case Benchmark::single_task_convergence: return "single_task_convergence";
    }
    return "?";
}

std::string to_string(GradScale s) { return s == GradScale::mean ? "mean" : "sum"; }

Method method_from_string(const std::string& s) {
    if (s == "sgd") return Method::sgd;
    if (s == "adam") return Method::adam;
    if (s == "bgd") return Method::bgd;
    if (s == "badam") return Method::badam;
    throw std::invalid_argument("unknown method: " + s);
}

Benchmark benchmark_from_string(const std::string& s) {
    if (s == "split_mnist") return Benchmark::split_mnist;
    if (s == "split_fashion") return Benchmark::split_fashion;
    if (s == "pmnist") return Benchmark::pmnist;
    if (s == "grad_split_mnist") return Benchmark::grad_split_mnist;
    if (s == "grad_split_fashion") return Benchmark::grad_split_fashion;
    if (s == "single_task_convergence") return Benchmark::single_task_convergence;
    throw std::invalid_argument("unknown benchmark: " + s);
}

GradScale grad_scale_from_string(const std::string& s) {
    if (s == "mean") return GradScale::mean;
    if (s == "sum") return GradScale::sum;
    throw std::invalid_argument("unknown grad_scale: " + s);
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw std::invalid_argument("config: seed list must be non-empty");
    if (mc_samples < 1) throw std::invalid_argument("config: mc_samples must be >= 1");
    if (eta && !(*eta > 0.0)) throw std::invalid_argument("config: eta must be > 0");
    if (sigma0 && !(*sigma0 > 0.0)) throw std::invalid_argument("config: sigma0 must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("config: betas must be in [0, 1)");
    }
    if (!(gamma > 0.0)) throw std::invalid_argument("config: gamma must be > 0");
    if (epochs && *epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (batch_size && *batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (pmnist_tasks < 1) throw std::invalid_argument("config: pmnist_tasks must be >= 1");
    if (!(width_divisor > 0.0)) throw std::invalid_argument("config: width_divisor must be > 0");
    if (checkpoints < 1) throw std::invalid_argument("config: checkpoints must be >= 1");
}

std::size_t ExperimentConfig::resolved_epochs() const {
    if (epochs) return *epochs;
    switch (benchmark) {
        case Benchmark::split_mnist:
        case Benchmark::split_fashion: return 20;
        case Benchmark::pmnist: return 30;
        case Benchmark::grad_split_mnist:
        case Benchmark::grad_split_fashion: return 1;
        case Benchmark::single_task_convergence: return 10;
    }
    return 1;
}

std::size_t ExperimentConfig::resolved_batch_size() const {
    if (batch_size) return *batch_size;
    switch (benchmark) {
        case Benchmark::grad_split_mnist:
        case Benchmark::grad_split_fashion: return 128;
        default: return 256;
    }
}

double ExperimentConfig::resolved_eta() const { return resolved_eta(method); }

double ExperimentConfig::resolved_eta(Method m) const {
    if (eta && m == method) return *eta;
    switch (m) {
        case Method::sgd: return 0.1;
        case Method::adam: return 1e-3;
        case Method::bgd:
            switch (benchmark) {
                case Benchmark::grad_split_mnist:
                case Benchmark::grad_split_fashion: return 10.0;
                default: return 1.0;
            }
        case Method::badam:
            switch (benchmark) {
                case Benchmark::split_mnist:
                case Benchmark::split_fashion:
                case Benchmark::single_task_convergence: return 0.01;
                default: return 0.1;
            }
    }
    return 0.1;
}

double ExperimentConfig::resolved_sigma0() const { return resolved_sigma0(method); }

double ExperimentConfig::resolved_sigma0(Method m) const {
    if (sigma0 && m == method) return *sigma0;
    if (m == Method::bgd) {
        switch (benchmark) {
            case Benchmark::grad_split_mnist:
            case Benchmark::grad_split_fashion: return 0.017;
            default: return 0.01;
        }
    }
    // badam
    switch (benchmark) {
        case Benchmark::split_mnist:
        case Benchmark::single_task_convergence: return 0.011;
        case Benchmark::split_fashion: return 0.005;
        default: return 0.01;
    }
}

std::vector<std::size_t> ExperimentConfig::resolved_arch() const {
    if (arch) return *arch;
    switch (benchmark) {
        case Benchmark::split_mnist:
        case Benchmark::single_task_convergence: return {784, 256, 256, 10};
        case Benchmark::split_fashion: return {784, 200, 200, 200, 200, 10};
        case Benchmark::pmnist: return {784, 100, 100, 10};
        case Benchmark::grad_split_mnist:
        case Benchmark::grad_split_fashion: return {784, 200, 200, 10};
    }
    return {784, 256, 256, 10};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
    try {
        const long long n = std::stoll(v);
        if (n < 0) throw std::invalid_argument("negative");
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
}

std::vector<std::size_t> parse_width_list(const std::string& v) {
    std::vector<std::size_t> widths;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        widths.push_back(to_count("arch", trim(item)));
    }
    if (widths.size() < 2) throw std::invalid_argument("config: arch needs >= 2 widths");
    return widths;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const auto a = to_count("seeds", trim(text.substr(0, dots)));
        const auto b = to_count("seeds", trim(text.substr(dots + 2)));
        if (b < a) throw std::invalid_argument("config: seed range end < start");
        for (std::size_t s = a; s <= b; ++s) seeds.push_back(s);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            seeds.push_back(to_count("seeds", trim(item)));
        }
    }
    if (seeds.empty()) throw std::invalid_argument("config: empty seed list");
    return seeds;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "method") {
            cfg.method = method_from_string(value);
        } else if (key == "benchmark") {
            cfg.benchmark = benchmark_from_string(value);
        } else if (key == "seeds") {
            cfg.seeds = parse_seed_list(value);
        } else if (key == "epochs") {
            cfg.epochs = to_count(key, value);
        } else if (key == "batch_size") {
            cfg.batch_size = to_count(key, value);
        } else if (key == "mc_samples") {
            cfg.mc_samples = to_count(key, value);
        } else if (key == "eta") {
            cfg.eta = to_double(key, value);
        } else if (key == "sigma0") {
            cfg.sigma0 = to_double(key, value);
        } else if (key == "beta1") {
            cfg.beta1 = to_double(key, value);
        } else if (key == "beta2") {
            cfg.beta2 = to_double(key, value);
        } else if (key == "gamma") {
            cfg.gamma = to_double(key, value);
        } else if (key == "arch") {
            cfg.arch = parse_width_list(value);
        } else if (key == "data_root") {
            cfg.data_root = value;
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "workers") {
            cfg.workers = to_count(key, value);
        } else if (key == "grad_scale") {
            cfg.grad_scale = grad_scale_from_string(value);
        } else if (key == "pmnist_tasks") {
            cfg.pmnist_tasks = to_count(key, value);
        } else if (key == "width_divisor") {
            cfg.width_divisor = to_double(key, value);
        } else if (key == "trace_every") {
            cfg.trace_every = to_count(key, value);
        } else if (key == "checkpoints") {
            cfg.checkpoints = to_count(key, value);
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace badam
