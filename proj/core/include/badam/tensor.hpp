#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace badam {

// Dense row-major matrix of doubles. The only tensor shape the project
// needs: batches of flattened images and layer activations.
struct Tensor2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Tensor2D() = default;
    Tensor2D(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}
    Tensor2D(std::size_t r, std::size_t c, std::vector<double> v)
        : rows(r), cols(c), values(std::move(v)) {
        if (values.size() != rows * cols) {
            throw std::invalid_argument("Tensor2D: values.size() != rows*cols");
        }
    }

    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    double* data() { return values.data(); }
    const double* data() const { return values.data(); }

    double* row(std::size_t r) { return values.data() + r * cols; }
    const double* row(std::size_t r) const { return values.data() + r * cols; }

    bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

}  // namespace badam
