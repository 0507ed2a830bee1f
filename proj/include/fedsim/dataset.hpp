#pragma once

#include <string>
#include <vector>

#include "fedsim/rng.hpp"

namespace fedsim {

// A labeled dataset. Inputs are row-major n x d with values in [0, 1];
// labels are class indices in [0, n_classes).
struct Dataset {
    std::vector<double> inputs;
    std::vector<int> labels;
    int n = 0;
    int d = 0;
    int n_classes = 0;

    const double* row(int i) const { return inputs.data() + static_cast<std::size_t>(i) * d; }
};

// Gaussian class clusters with unit noise, means placed on random unit
// directions scaled by class_separation, then min-max scaled per dimension
// into [0, 1]. Sample i gets label i % n_classes, so classes are balanced
// within one sample.
Dataset generate_synthetic(int n_samples, int d, int n_classes, double class_separation, Rng& rng);

// Splits off the first n_train rows. The label pattern of generate_synthetic
// keeps both parts class-balanced.
std::pair<Dataset, Dataset> split_dataset(const Dataset& full, int n_train);

// IDX-format loader (big-endian headers, magic 0x00000803 for images and
// 0x00000801 for labels). Pixel bytes are scaled to [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace fedsim
