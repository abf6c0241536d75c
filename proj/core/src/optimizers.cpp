#include "badam/optimizers.hpp"

#include <cmath>
#include <stdexcept>

namespace badam {

MomentState MomentState::make(std::size_t n, double eta, double beta1, double beta2,
                              double gamma) {
    MomentState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    s.t = 0;
    s.eta = eta;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.gamma = gamma;
    s.validate();
    return s;
}

void MomentState::validate() const {
    if (m.size() != v.size()) throw std::invalid_argument("MomentState: m/v length mismatch");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("MomentState: betas must be in [0, 1)");
    }
    if (!(gamma > 0.0)) throw std::invalid_argument("MomentState: gamma must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("MomentState: eta must be > 0");
}

void sigma_step(std::span<double> sigma, std::span<const double> e_g_eps) {
    if (sigma.size() != e_g_eps.size()) {
        throw std::invalid_argument("sigma_step: length mismatch");
    }
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double s = sigma[i];
        const double x = 0.5 * s * e_g_eps[i];
        // s * (sqrt(1 + x^2) - x). For x > 0 the subtraction cancels
        // catastrophically once x is large (sqrt(1+x^2) rounds to x and the
        // result collapses to 0); s / (sqrt(1+x^2) + x) is the same value in
        // exact arithmetic and keeps the update strictly positive.
        if (x > 0.0) {
            sigma[i] = s / (std::sqrt(1.0 + x * x) + x);
        } else {
            sigma[i] = s * std::sqrt(1.0 + x * x) - s * x;
        }
    }
}

void bgd_mu_step(std::span<double> mu, std::span<const double> sigma, std::span<const double> e_g,
                 const BgdConfig& cfg) {
    if (mu.size() != sigma.size() || mu.size() != e_g.size()) {
        throw std::invalid_argument("bgd_mu_step: length mismatch");
    }
    if (!(cfg.eta > 0.0)) throw std::invalid_argument("bgd_mu_step: eta must be > 0");
    for (std::size_t i = 0; i < mu.size(); ++i) {
        mu[i] -= cfg.eta * sigma[i] * sigma[i] * e_g[i];
    }
}

namespace {

// Shared Adam core; `sigma` empty means unit scaling (plain Adam).
void moment_step(std::span<double> params, std::span<const double> sigma,
                 std::span<const double> grad, MomentState& state) {
    if (params.size() != grad.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("moment step: length mismatch");
    }
    if (!sigma.empty() && sigma.size() != params.size()) {
        throw std::invalid_argument("moment step: sigma length mismatch");
    }
    state.t += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double m_corr = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double v_corr = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / m_corr;
        const double v_hat = state.v[i] / v_corr;
        const double scale = sigma.empty() ? 1.0 : sigma[i] * sigma[i];
        params[i] -= state.eta * scale * m_hat / (std::sqrt(v_hat) + state.gamma);
    }
}

}  // namespace

void badam_mu_step(std::span<double> mu, std::span<const double> sigma,
                   std::span<const double> e_g, BAdamState& state) {
    moment_step(mu, sigma, e_g, state);
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state) {
    moment_step(params, {}, grad, state);
}

void sgd_step(std::span<double> params, std::span<const double> grad, double eta) {
    if (params.size() != grad.size()) throw std::invalid_argument("sgd_step: length mismatch");
    if (!(eta > 0.0)) throw std::invalid_argument("sgd_step: eta must be > 0");
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= eta * grad[i];
    }
}

}  // namespace badam
