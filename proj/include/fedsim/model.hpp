#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedsim/dataset.hpp"
#include "fedsim/parameter_vector.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

// A mini-batch: row-major n x d inputs plus integer class labels.
struct Batch {
    std::vector<double> inputs;
    std::vector<int> labels;
    int n = 0;
    int d = 0;
};

Batch full_batch(const Dataset& data);
Batch gather_batch(const Dataset& data, std::span<const int> indices);

// Feed-forward softmax classifier over flat parameters: a plain linear
// model when hidden is empty, otherwise an MLP with ReLU hidden layers.
//
// Flat layout, layer by layer from input to output: the weight matrix
// (rows = layer outputs, columns = layer inputs, row-major), then the bias
// vector. parameter_count() is the total across all layers.
class Model {
public:
    Model(int d_in, std::vector<int> hidden, int n_classes);
    static Model linear(int d_in, int n_classes) { return Model(d_in, {}, n_classes); }

    int d_in() const { return d_in_; }
    int n_classes() const { return n_classes_; }
    const std::vector<int>& hidden() const { return hidden_; }
    bool is_linear() const { return hidden_.empty(); }

    // [d_in, hidden..., n_classes]
    std::vector<int> layer_sizes() const;
    int parameter_count() const;

private:
    int d_in_;
    std::vector<int> hidden_;
    int n_classes_;
};

// He-style uniform weight init (limit sqrt(6 / fan_in)), zero biases.
ParameterVector init_params(const Model& model, Rng& rng);

struct LossGrad {
    double loss = 0.0;
    ParameterVector grad;
};

// Mean softmax cross-entropy over the batch and its exact gradient.
LossGrad loss_and_gradient(const Model& model, const ParameterVector& params, const Batch& batch);
double loss_only(const Model& model, const ParameterVector& params, const Batch& batch);

// result[i] = params[i] - lr * grad[i]
ParameterVector sgd_step(const ParameterVector& params, const ParameterVector& grad, double lr);

struct SgdOptions {
    int epochs = 1;
    double lr = 0.01;
    int batch_size = 32;
    // Classical heavy-ball momentum; velocity is zeroed per local_train call.
    double momentum = 0.0;
    // When prox_mu > 0 every step adds prox_mu * (w - *prox_center) to the
    // gradient.
    double prox_mu = 0.0;
    const ParameterVector* prox_center = nullptr;
};

// epochs of mini-batch SGD over the given sample indices. Index order is
// reshuffled once per epoch from rng; the last partial batch is kept. Takes
// exactly epochs * ceil(|indices| / batch_size) gradient steps, added to
// *steps_out when provided.
ParameterVector local_train(const Model& model, const ParameterVector& start,
                            const Dataset& data, std::span<const int> indices,
                            const SgdOptions& opt, Rng& rng,
                            std::uint64_t* steps_out = nullptr);

struct WeightedParams {
    const ParameterVector* params;
    double weight;
};

// sum_i (w_i / W) * p_i with W = sum w_i. Weights are normalized before
// accumulation so a single entry is returned bit-exactly.
ParameterVector weighted_average(std::span<const WeightedParams> entries);

struct EvalResult {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

// Argmax accuracy (ties break to the lowest class index) and mean
// cross-entropy over the whole set.
EvalResult evaluate(const Model& model, const ParameterVector& params, const Batch& test);
EvalResult evaluate(const Model& model, const ParameterVector& params, const Dataset& test);

}  // namespace fedsim
