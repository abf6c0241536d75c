#include "badam/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "badam/idx.hpp"

namespace badam {

void LabeledDataset::validate() const {
    if (images.rows != labels.size()) {
        throw std::invalid_argument("LabeledDataset: images.rows != labels.length");
    }
    for (double v : images.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("LabeledDataset: pixel outside [0,1]");
        }
    }
    for (int y : labels) {
        if (y < 0 || y >= 10) throw std::invalid_argument("LabeledDataset: label outside [0,10)");
    }
}

LabeledDataset load_idx_dataset(const std::string& images_path, const std::string& labels_path) {
    const IdxData img = parse_idx(read_file_bytes(images_path));
    const IdxData lab = parse_idx(read_file_bytes(labels_path));
    if (img.dims.size() != 3) throw std::runtime_error("images file is not a 3-dim IDX");
    if (lab.dims.size() != 1) throw std::runtime_error("labels file is not a 1-dim IDX");
    if (img.dims[0] != lab.dims[0]) {
        throw std::runtime_error("image/label count mismatch between " + images_path + " and " +
                                 labels_path);
    }
    const std::size_t n = img.dims[0];
    const std::size_t pixels = img.dims[1] * img.dims[2];

    LabeledDataset ds;
    ds.images = Tensor2D(n, pixels);
    for (std::size_t i = 0; i < n * pixels; ++i) {
        ds.images.values[i] = static_cast<double>(img.payload[i]) / 255.0;
    }
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels[i] = static_cast<int>(lab.payload[i]);
    }
    return ds;
}

LabeledDataset load_split(const std::string& data_root, const std::string& name, bool train) {
    const std::string prefix = data_root + "/" + name + "/" + (train ? "train" : "t10k");
    return load_idx_dataset(prefix + "-images-idx3-ubyte", prefix + "-labels-idx1-ubyte");
}

namespace {

LabeledDataset select_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows) {
    LabeledDataset out;
    out.images = Tensor2D(rows.size(), ds.images.cols);
    out.labels.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy_n(ds.images.row(rows[i]), ds.images.cols, out.images.row(i));
        out.labels[i] = ds.labels[rows[i]];
    }
    return out;
}

}  // namespace

std::vector<TaskDataset> split_by_classes(const LabeledDataset& train, const LabeledDataset& test,
                                          const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> owner(10, -1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        for (int cls : {pairs[k].first, pairs[k].second}) {
            if (cls < 0 || cls > 9) throw std::invalid_argument("split_by_classes: class out of range");
            if (owner[static_cast<std::size_t>(cls)] != -1) {
                throw std::invalid_argument("split_by_classes: overlapping pairs");
            }
            owner[static_cast<std::size_t>(cls)] = static_cast<int>(k);
        }
    }
    for (int k : owner) {
        if (k == -1) throw std::invalid_argument("split_by_classes: pairs must cover {0..9}");
    }

    std::vector<TaskDataset> tasks(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (owner[static_cast<std::size_t>(train.labels[i])] == static_cast<int>(k)) {
                train_rows.push_back(i);
            }
        }
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (owner[static_cast<std::size_t>(test.labels[i])] == static_cast<int>(k)) {
                test_rows.push_back(i);
            }
        }
        tasks[k].task_id = static_cast<int>(k);
        tasks[k].train = select_rows(train, train_rows);
        tasks[k].test = select_rows(test, test_rows);
    }
    return tasks;
}

LabeledDataset permute_pixels(const LabeledDataset& ds, std::span<const std::size_t> perm) {
    const std::size_t p = ds.images.cols;
    if (perm.size() != p) throw std::invalid_argument("permute_pixels: perm length mismatch");
    std::vector<bool> seen(p, false);
    for (std::size_t v : perm) {
        if (v >= p || seen[v]) throw std::invalid_argument("permute_pixels: perm is not a bijection");
        seen[v] = true;
    }
    LabeledDataset out;
    out.labels = ds.labels;
    out.images = Tensor2D(ds.images.rows, p);
    for (std::size_t r = 0; r < ds.images.rows; ++r) {
        const double* src = ds.images.row(r);
        double* dst = out.images.row(r);
        for (std::size_t c = 0; c < p; ++c) dst[c] = src[perm[c]];
    }
    return out;
}

std::vector<std::size_t> identity_permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return perm;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    auto perm = identity_permutation(n);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

}  // namespace badam
