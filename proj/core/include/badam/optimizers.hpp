#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace badam {

struct BgdConfig {
    double eta = 1.0;
};

// Adam-style moment state. Used both for BAdam (variance-scaled step on mu)
// and the plain Adam baseline.
struct MomentState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double gamma = 1e-8;
    double eta = 1e-3;

    static MomentState make(std::size_t n, double eta, double beta1 = 0.9, double beta2 = 0.999,
                            double gamma = 1e-8);
    void validate() const;
};

using BAdamState = MomentState;
using AdamState = MomentState;

// Closed-form standard-deviation update, evaluated at the prior parameters:
//   sigma_t = sigma * sqrt(1 + (sigma * e_g_eps / 2)^2) - sigma^2 * e_g_eps / 2
// Total rule: output stays > 0 for every finite input.
void sigma_step(std::span<double> sigma, std::span<const double> e_g_eps);

// mu_t = mu - eta * sigma^2 * e_g, sigma is the pre-update value.
void bgd_mu_step(std::span<double> mu, std::span<const double> sigma, std::span<const double> e_g,
                 const BgdConfig& cfg);

// Bias-corrected moment step scaled by sigma^2 (pre-update sigma):
//   mu_t = mu - eta * sigma^2 * m_hat / (sqrt(v_hat) + gamma)
// Advances state.t and the moment accumulators.
void badam_mu_step(std::span<double> mu, std::span<const double> sigma,
                   std::span<const double> e_g, BAdamState& state);

// Standard Adam on a deterministic gradient; identical to badam_mu_step with
// sigma^2 == 1.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state);

// params -= eta * grad.
void sgd_step(std::span<double> params, std::span<const double> grad, double eta);

}  // namespace badam
