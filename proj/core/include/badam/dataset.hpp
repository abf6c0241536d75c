#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "badam/rng.hpp"
#include "badam/tensor.hpp"

namespace badam {

// Flattened images with pixel values in [0, 1] and class ids in [0, 10).
struct LabeledDataset {
    Tensor2D images;           // n x 784
    std::vector<int> labels;   // length n

    std::size_t size() const { return labels.size(); }
    void validate() const;
};

struct TaskDataset {
    int task_id = 0;
    LabeledDataset train;
    LabeledDataset test;
};

// Load one IDX image/label pair and normalize pixels by 1/255.
LabeledDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path);

// Standard directory layout:
//   <data_root>/{mnist,fashion}/{train,t10k}-{images-idx3,labels-idx1}-ubyte
LabeledDataset load_split(const std::string& data_root, const std::string& name, bool train);

// Class-incremental split. Original labels are kept (single-headed setup:
// the output layer stays 10-wide). `pairs` must partition {0..9}.
std::vector<TaskDataset> split_by_classes(const LabeledDataset& train, const LabeledDataset& test,
                                          const std::vector<std::pair<int, int>>& pairs);

inline std::vector<std::pair<int, int>> canonical_pairs() {
    return {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}};
}

// Column i of the output is column perm[i] of the input; labels unchanged.
LabeledDataset permute_pixels(const LabeledDataset& ds, std::span<const std::size_t> perm);

std::vector<std::size_t> identity_permutation(std::size_t n);
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace badam
