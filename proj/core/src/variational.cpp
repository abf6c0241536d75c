#include "badam/variational.hpp"

#include <cmath>
#include <stdexcept>

namespace badam {

void VariationalParams::validate() const {
    if (mu.size() != sigma.size()) {
        throw std::invalid_argument("VariationalParams: mu/sigma length mismatch");
    }
    for (double s : sigma) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("VariationalParams: sigma entries must be finite and > 0");
        }
    }
    for (double m : mu) {
        if (!std::isfinite(m)) {
            throw std::invalid_argument("VariationalParams: mu entries must be finite");
        }
    }
}

std::vector<double> init_flat_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<double> params(param_count(spec));
    std::size_t off = 0;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t n_in = spec.layer_widths[l];
        const std::size_t n_out = spec.layer_widths[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(n_in));
        fill_uniform(rng, std::span<double>(params.data() + off, n_in * n_out), -bound, bound);
        // biases stay zero
        off += n_in * n_out + n_out;
    }
    return params;
}

VariationalParams init_variational(const MlpSpec& spec, double sigma0, Rng& rng) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("init_variational: sigma0 must be > 0");
    VariationalParams vp;
    vp.mu = init_flat_params(spec, rng);
    vp.sigma.assign(vp.mu.size(), sigma0);
    return vp;
}

std::vector<double> sample_theta(const VariationalParams& vp, std::span<const double> eps) {
    if (eps.size() != vp.size()) {
        throw std::invalid_argument("sample_theta: eps length mismatch");
    }
    std::vector<double> theta(vp.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = vp.mu[i] + eps[i] * vp.sigma[i];
    }
    return theta;
}

McEstimate mc_expectations(const GradFn& grad_fn, const VariationalParams& vp, std::size_t k,
                           Rng& rng) {
    if (k < 1) throw std::invalid_argument("mc_expectations: k must be >= 1");
    const std::size_t n = vp.size();

    McEstimate est;
    est.k = k;
    est.e_g.assign(n, 0.0);
    est.e_g_eps.assign(n, 0.0);

    std::vector<double> eps(n);
    std::vector<double> theta(n);
    std::vector<double> grad(n);
    for (std::size_t j = 0; j < k; ++j) {
        fill_normal(rng, eps);
        for (std::size_t i = 0; i < n; ++i) theta[i] = vp.mu[i] + eps[i] * vp.sigma[i];
        est.mean_loss += grad_fn(theta, grad);
        for (std::size_t i = 0; i < n; ++i) {
            est.e_g[i] += grad[i];
            est.e_g_eps[i] += grad[i] * eps[i];
        }
    }
    const double inv_k = 1.0 / static_cast<double>(k);
    est.mean_loss *= inv_k;
    for (std::size_t i = 0; i < n; ++i) {
        est.e_g[i] *= inv_k;
        est.e_g_eps[i] *= inv_k;
    }
    return est;
}

McEstimate mc_expectations(const MlpSpec& spec, const VariationalParams& vp, const Tensor2D& x,
                           std::span<const int> labels, std::size_t k, Rng& rng) {
    return mc_expectations(
        [&](std::span<const double> theta, std::span<double> grad_out) {
            return loss_and_grad_into(spec, theta, x, labels, grad_out);
        },
        vp, k, rng);
}

}  // namespace badam
