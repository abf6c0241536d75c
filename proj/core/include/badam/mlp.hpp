#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "badam/tensor.hpp"

namespace badam {

enum class Activation { relu };

// Fully connected architecture: layer_widths = {input, hidden..., output}.
struct MlpSpec {
    std::vector<std::size_t> layer_widths;
    Activation activation = Activation::relu;

    void validate() const;
    std::size_t input_width() const { return layer_widths.front(); }
    std::size_t output_width() const { return layer_widths.back(); }
    // Number of affine layers.
    std::size_t layer_count() const { return layer_widths.size() - 1; }
};

// Flat parameter layout, layer-major. For affine layer l mapping
// in -> out units, the block is:
//   W_l, row-major [out][in], followed by b_l [out].
// Blocks are concatenated in layer order. This ordering is part of the
// library contract: optimizer state and diagnostics index into it.
std::size_t param_count(const MlpSpec& spec);

// Offset of layer l's block inside the flat vector.
std::size_t layer_offset(const MlpSpec& spec, std::size_t layer);

// Logits for a batch; ReLU between layers, identity on the output layer.
Tensor2D forward(const MlpSpec& spec, std::span<const double> params, const Tensor2D& x);

struct LossGrad {
    double loss = 0.0;                 // mean softmax cross-entropy over the batch
    std::vector<double> grad;          // same layout/length as params
};

// Mean softmax cross-entropy plus its gradient via backpropagation.
// Softmax is fused into the loss (log-sum-exp); forward() returns raw logits.
LossGrad loss_and_grad(const MlpSpec& spec, std::span<const double> params,
                       const Tensor2D& x, std::span<const int> labels);

// Allocation-free variant writing the gradient into grad_out; returns the
// loss. The Monte-Carlo estimator calls this once per draw.
double loss_and_grad_into(const MlpSpec& spec, std::span<const double> params, const Tensor2D& x,
                          std::span<const int> labels, std::span<double> grad_out);

// Central finite differences over an arbitrary scalar loss; test oracle.
using LossFn = std::function<double(std::span<const double>)>;
std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params, double h);

// Finite-difference gradient of the MLP loss itself. O(param_count) loss
// evaluations; intended for tiny networks.
std::vector<double> finite_diff_grad(const MlpSpec& spec, std::span<const double> params,
                                     const Tensor2D& x, std::span<const int> labels, double h);

}  // namespace badam
