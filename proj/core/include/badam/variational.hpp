#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "badam/mlp.hpp"
#include "badam/rng.hpp"
#include "badam/tensor.hpp"

namespace badam {

// Mean-field Gaussian posterior over the flat parameter vector:
// theta_i = mu_i + eps_i * sigma_i with eps ~ N(0, I).
struct VariationalParams {
    std::vector<double> mu;
    std::vector<double> sigma;

    std::size_t size() const { return mu.size(); }
    void validate() const;
};

// Monte-Carlo averages over k reparameterized draws:
//   e_g     ~ E_eps[ dL/dtheta ]
//   e_g_eps ~ E_eps[ dL/dtheta * eps ]  (elementwise)
struct McEstimate {
    std::vector<double> e_g;
    std::vector<double> e_g_eps;
    std::size_t k = 0;
    double mean_loss = 0.0;
};

// sigma_i = sigma0 everywhere. mu: fan-in-scaled uniform
// U(-sqrt(6/fan_in), +sqrt(6/fan_in)) for weights, zero for biases.
VariationalParams init_variational(const MlpSpec& spec, double sigma0, Rng& rng);

// Same mu scheme as init_variational, for the point-estimate baselines so
// that all methods start from the same distribution.
std::vector<double> init_flat_params(const MlpSpec& spec, Rng& rng);

// theta_i = mu_i + eps_i * sigma_i.
std::vector<double> sample_theta(const VariationalParams& vp, std::span<const double> eps);

// Gradient callback: writes dL/dtheta into grad_out, returns the loss.
using GradFn = std::function<double(std::span<const double> theta, std::span<double> grad_out)>;

// Generic estimator; draws k eps vectors in a fixed order so the result is
// a deterministic function of (inputs, rng state).
McEstimate mc_expectations(const GradFn& grad_fn, const VariationalParams& vp, std::size_t k,
                           Rng& rng);

// Estimator over the MLP cross-entropy loss.
McEstimate mc_expectations(const MlpSpec& spec, const VariationalParams& vp, const Tensor2D& x,
                           std::span<const int> labels, std::size_t k, Rng& rng);

}  // namespace badam
