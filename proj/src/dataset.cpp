#include "fedsim/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "fedsim/errors.hpp"

namespace fedsim {

Dataset generate_synthetic(int n_samples, int d, int n_classes, double class_separation, Rng& rng) {
    if (n_classes < 2) throw contract_error("generate_synthetic: need at least 2 classes");
    if (n_samples < n_classes) throw contract_error("generate_synthetic: n_samples must be >= n_classes");
    if (d < 2) throw contract_error("generate_synthetic: d must be >= 2");
    if (class_separation < 0.0) throw contract_error("generate_synthetic: separation must be >= 0");

    // Class means on random unit directions, unit isotropic noise.
    std::vector<double> means(static_cast<std::size_t>(n_classes) * d);
    for (int c = 0; c < n_classes; ++c) {
        double norm_sq = 0.0;
        double* mu = means.data() + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) {
            mu[j] = rng.normal();
            norm_sq += mu[j] * mu[j];
        }
        const double scale = class_separation / std::max(std::sqrt(norm_sq), 1e-12);
        for (int j = 0; j < d; ++j) mu[j] *= scale;
    }

    Dataset data;
    data.n = n_samples;
    data.d = d;
    data.n_classes = n_classes;
    data.inputs.resize(static_cast<std::size_t>(n_samples) * d);
    data.labels.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const int c = i % n_classes;
        data.labels[i] = c;
        const double* mu = means.data() + static_cast<std::size_t>(c) * d;
        double* x = data.inputs.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) x[j] = mu[j] + rng.normal();
    }

    // Min-max scale each dimension into [0, 1].
    for (int j = 0; j < d; ++j) {
        double lo = data.inputs[j], hi = data.inputs[j];
        for (int i = 1; i < n_samples; ++i) {
            const double v = data.inputs[static_cast<std::size_t>(i) * d + j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double range = hi - lo;
        for (int i = 0; i < n_samples; ++i) {
            double& v = data.inputs[static_cast<std::size_t>(i) * d + j];
            v = range > 0.0 ? (v - lo) / range : 0.5;
        }
    }
    return data;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& full, int n_train) {
    if (n_train < 1 || n_train >= full.n) {
        throw contract_error("split_dataset: n_train must be in [1, n)");
    }
    Dataset train, test;
    train.d = test.d = full.d;
    train.n_classes = test.n_classes = full.n_classes;
    train.n = n_train;
    test.n = full.n - n_train;
    train.inputs.assign(full.inputs.begin(), full.inputs.begin() + static_cast<std::size_t>(n_train) * full.d);
    train.labels.assign(full.labels.begin(), full.labels.begin() + n_train);
    test.inputs.assign(full.inputs.begin() + static_cast<std::size_t>(n_train) * full.d, full.inputs.end());
    test.labels.assign(full.labels.begin() + n_train, full.labels.end());
    return {std::move(train), std::move(test)};
}

}  // namespace fedsim
