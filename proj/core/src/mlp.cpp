#include "badam/mlp.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace badam {

namespace {

// OpenBLAS DYNAMIC_ARCH picks its kernels from the CPUID model table and
// falls back to Prescott (SSE2) when the model is unlisted, as happens on
// virtualized CPUs with masked model strings. The feature bits are still
// reported, so steer the choice before OpenBLAS initializes; an existing
// OPENBLAS_CORETYPE in the environment wins. Priority 101 runs ahead of
// default-priority constructors (OpenBLAS's own init when linked statically).
__attribute__((constructor(101))) void set_blas_coretype() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx512f")) {
        setenv("OPENBLAS_CORETYPE", "SKYLAKEX", 0);
    } else if (__builtin_cpu_supports("avx2")) {
        setenv("OPENBLAS_CORETYPE", "HASWELL", 0);
    }
#endif
}

}  // namespace

void MlpSpec::validate() const {
    if (layer_widths.size() < 2) {
        throw std::invalid_argument("MlpSpec: need at least input and output widths");
    }
    for (std::size_t w : layer_widths) {
        if (w < 1) throw std::invalid_argument("MlpSpec: all widths must be >= 1");
    }
}

std::size_t param_count(const MlpSpec& spec) {
    spec.validate();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
        n += spec.layer_widths[l] * spec.layer_widths[l + 1] + spec.layer_widths[l + 1];
    }
    return n;
}

std::size_t layer_offset(const MlpSpec& spec, std::size_t layer) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        off += spec.layer_widths[l] * spec.layer_widths[l + 1] + spec.layer_widths[l + 1];
    }
    return off;
}

namespace {

void check_inputs(const MlpSpec& spec, std::span<const double> params, const Tensor2D& x) {
    spec.validate();
    if (x.cols != spec.input_width()) {
        throw std::invalid_argument("forward: x.cols (" + std::to_string(x.cols) +
                                    ") != input width (" + std::to_string(spec.input_width()) + ")");
    }
    if (params.size() != param_count(spec)) {
        throw std::invalid_argument("forward: params length " + std::to_string(params.size()) +
                                    " != param_count " + std::to_string(param_count(spec)));
    }
}

// out[batch x n_out] = x * W^T + b, W row-major [n_out][n_in].
void affine(const double* x, std::size_t rows, std::size_t n_in, const double* w, const double* b,
            double* out, std::size_t n_out) {
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<blasint>(rows),
                static_cast<blasint>(n_out), static_cast<blasint>(n_in), 1.0, x,
                static_cast<blasint>(n_in), w, static_cast<blasint>(n_in), 0.0, out,
                static_cast<blasint>(n_out));
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = out + r * n_out;
        for (std::size_t j = 0; j < n_out; ++j) row[j] += b[j];
    }
}

// Reused per-thread buffers; the training loop calls this millions of times.
struct Workspace {
    std::vector<Tensor2D> acts;  // post-activation per affine layer
    Tensor2D delta;
    Tensor2D delta_prev;
};

Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
}

// Post-activation values of every affine layer; acts.back() holds logits.
// The input batch itself is not copied.
std::vector<Tensor2D>& forward_into_workspace(const MlpSpec& spec, std::span<const double> params,
                                              const Tensor2D& x) {
    std::vector<Tensor2D>& acts = workspace().acts;
    acts.resize(spec.layer_count());
    const double* input = x.data();
    std::size_t off = 0;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t n_in = spec.layer_widths[l];
        const std::size_t n_out = spec.layer_widths[l + 1];
        Tensor2D& z = acts[l];
        if (z.rows != x.rows || z.cols != n_out) z = Tensor2D(x.rows, n_out);
        affine(input, x.rows, n_in, params.data() + off, params.data() + off + n_in * n_out,
               z.data(), n_out);
        if (l + 1 < spec.layer_count()) {
            for (double& v : z.values) v = v > 0.0 ? v : 0.0;
        }
        input = z.data();
        off += n_in * n_out + n_out;
    }
    return acts;
}

double loss_from_logits(const Tensor2D& logits, std::span<const int> labels, Tensor2D* delta) {
    const std::size_t batch = logits.rows;
    const double inv_batch = 1.0 / static_cast<double>(batch);
    double loss = 0.0;
    for (std::size_t r = 0; r < batch; ++r) {
        const double* lr = logits.row(r);
        double m = lr[0];
        for (std::size_t c = 1; c < logits.cols; ++c) m = std::max(m, lr[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols; ++c) sum += std::exp(lr[c] - m);
        const double lse = m + std::log(sum);
        loss += (lse - lr[static_cast<std::size_t>(labels[r])]) * inv_batch;
        if (delta != nullptr) {
            double* dr = delta->row(r);
            for (std::size_t c = 0; c < logits.cols; ++c) {
                dr[c] = std::exp(lr[c] - lse) * inv_batch;
            }
            dr[static_cast<std::size_t>(labels[r])] -= inv_batch;
        }
    }
    return loss;
}

void check_labels(const MlpSpec& spec, const Tensor2D& x, std::span<const int> labels) {
    if (x.rows == 0) throw std::invalid_argument("loss_and_grad: empty batch");
    if (labels.size() != x.rows) {
        throw std::invalid_argument("loss_and_grad: labels.size() != batch size");
    }
    const int n_classes = static_cast<int>(spec.output_width());
    for (int y : labels) {
        if (y < 0 || y >= n_classes) {
            throw std::invalid_argument("loss_and_grad: label out of range");
        }
    }
}

}  // namespace

Tensor2D forward(const MlpSpec& spec, std::span<const double> params, const Tensor2D& x) {
    check_inputs(spec, params, x);
    return forward_into_workspace(spec, params, x).back();
}

double loss_and_grad_into(const MlpSpec& spec, std::span<const double> params, const Tensor2D& x,
                          std::span<const int> labels, std::span<double> grad_out) {
    check_inputs(spec, params, x);
    check_labels(spec, x, labels);
    if (grad_out.size() != params.size()) {
        throw std::invalid_argument("loss_and_grad: grad_out length mismatch");
    }

    Workspace& ws = workspace();
    const std::vector<Tensor2D>& acts = forward_into_workspace(spec, params, x);
    const Tensor2D& logits = acts.back();
    const std::size_t batch = x.rows;

    if (ws.delta.rows != batch || ws.delta.cols != logits.cols) {
        ws.delta = Tensor2D(batch, logits.cols);
    }
    const double loss = loss_from_logits(logits, labels, &ws.delta);

    for (std::size_t l = spec.layer_count(); l-- > 0;) {
        const std::size_t n_in = spec.layer_widths[l];
        const std::size_t n_out = spec.layer_widths[l + 1];
        const std::size_t off = layer_offset(spec, l);
        const double* a_prev = (l == 0) ? x.data() : acts[l - 1].data();

        // gW[n_out][n_in] = delta^T * a_prev
        cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<blasint>(n_out),
                    static_cast<blasint>(n_in), static_cast<blasint>(batch), 1.0, ws.delta.data(),
                    static_cast<blasint>(n_out), a_prev, static_cast<blasint>(n_in), 0.0,
                    grad_out.data() + off, static_cast<blasint>(n_in));
        // gb[j] = sum_r delta[r][j]
        double* gb = grad_out.data() + off + n_in * n_out;
        std::fill_n(gb, n_out, 0.0);
        for (std::size_t r = 0; r < batch; ++r) {
            const double* dr = ws.delta.row(r);
            for (std::size_t j = 0; j < n_out; ++j) gb[j] += dr[j];
        }
        if (l == 0) break;

        // delta_prev = (delta * W) masked by ReLU'(a_prev)
        if (ws.delta_prev.rows != batch || ws.delta_prev.cols != n_in) {
            ws.delta_prev = Tensor2D(batch, n_in);
        }
        cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<blasint>(batch),
                    static_cast<blasint>(n_in), static_cast<blasint>(n_out), 1.0, ws.delta.data(),
                    static_cast<blasint>(n_out), params.data() + off, static_cast<blasint>(n_in),
                    0.0, ws.delta_prev.data(), static_cast<blasint>(n_in));
        const double* mask = acts[l - 1].data();
        for (std::size_t i = 0; i < ws.delta_prev.values.size(); ++i) {
            if (mask[i] <= 0.0) ws.delta_prev.values[i] = 0.0;
        }
        std::swap(ws.delta, ws.delta_prev);
    }
    return loss;
}

LossGrad loss_and_grad(const MlpSpec& spec, std::span<const double> params, const Tensor2D& x,
                       std::span<const int> labels) {
    LossGrad result;
    result.grad.resize(params.size());
    result.loss = loss_and_grad_into(spec, params, x, labels, result.grad);
    return result;
}

std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double up = loss(p);
        p[i] = saved - h;
        const double down = loss(p);
        p[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

std::vector<double> finite_diff_grad(const MlpSpec& spec, std::span<const double> params,
                                     const Tensor2D& x, std::span<const int> labels, double h) {
    check_labels(spec, x, labels);
    return finite_diff_grad(
        [&](std::span<const double> p) {
            const std::vector<Tensor2D>& acts = forward_into_workspace(spec, p, x);
            return loss_from_logits(acts.back(), labels, nullptr);
        },
        params, h);
}

}  // namespace badam
