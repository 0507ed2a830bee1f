#include "fedsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

struct LayerView {
    int in = 0;
    int out = 0;
    int w_off = 0;  // row-major out x in
    int b_off = 0;
};

std::vector<LayerView> layout(const Model& model) {
    const auto sizes = model.layer_sizes();
    std::vector<LayerView> layers(sizes.size() - 1);
    int off = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        layers[l].in = sizes[l];
        layers[l].out = sizes[l + 1];
        layers[l].w_off = off;
        layers[l].b_off = off + sizes[l] * sizes[l + 1];
        off = layers[l].b_off + sizes[l + 1];
    }
    return layers;
}

void require_batch(const Model& model, const ParameterVector& params, const Batch& batch) {
    if (batch.n < 1) throw contract_error("batch must contain at least one sample");
    if (batch.d != model.d_in()) {
        throw contract_error("batch feature dim " + std::to_string(batch.d) +
                             " does not match model input dim " + std::to_string(model.d_in()));
    }
    if (static_cast<int>(params.dim()) != model.parameter_count()) {
        throw contract_error("parameter dim " + std::to_string(params.dim()) +
                             " does not match model parameter count " +
                             std::to_string(model.parameter_count()));
    }
    for (int label : batch.labels) {
        if (label < 0 || label >= model.n_classes()) {
            throw contract_error("label " + std::to_string(label) + " outside [0, " +
                                 std::to_string(model.n_classes()) + ")");
        }
    }
}

void require_finite(std::span<const double> values, const std::string& where) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw numeric_error("non-finite value produced in " + where);
        }
    }
}

// act[0] is the input; act[l + 1] holds layer l's output (ReLU-activated on
// hidden layers, raw logits on the last).
void forward(std::span<const LayerView> layers, const ParameterVector& params,
             const Batch& batch, std::vector<std::vector<double>>& act) {
    const int n = batch.n;
    act.resize(layers.size() + 1);
    act[0].assign(batch.inputs.begin(), batch.inputs.end());
    const double* p = params.values().data();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& lay = layers[l];
        const bool last = (l + 1 == layers.size());
        act[l + 1].assign(static_cast<std::size_t>(n) * lay.out, 0.0);
        const double* x = act[l].data();
        double* y = act[l + 1].data();
        for (int r = 0; r < n; ++r) {
            const double* xr = x + static_cast<std::size_t>(r) * lay.in;
            double* yr = y + static_cast<std::size_t>(r) * lay.out;
            for (int o = 0; o < lay.out; ++o) {
                const double* w = p + lay.w_off + static_cast<std::size_t>(o) * lay.in;
                double z = p[lay.b_off + o];
                for (int i = 0; i < lay.in; ++i) z += w[i] * xr[i];
                yr[o] = (!last && z < 0.0) ? 0.0 : z;
            }
        }
        require_finite(act[l + 1],
                       last ? std::string("output layer") : "hidden layer " + std::to_string(l + 1));
    }
}

double cross_entropy(std::span<const double> logits_row, int label, double* probs_out) {
    double mx = logits_row[0];
    for (double v : logits_row) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t c = 0; c < logits_row.size(); ++c) {
        const double e = std::exp(logits_row[c] - mx);
        if (probs_out) probs_out[c] = e;
        sum += e;
    }
    if (probs_out) {
        for (std::size_t c = 0; c < logits_row.size(); ++c) probs_out[c] /= sum;
    }
    return mx + std::log(sum) - logits_row[label];
}

}  // namespace

Batch full_batch(const Dataset& data) {
    Batch b;
    b.inputs = data.inputs;
    b.labels = data.labels;
    b.n = data.n;
    b.d = data.d;
    return b;
}

Batch gather_batch(const Dataset& data, std::span<const int> indices) {
    Batch b;
    b.n = static_cast<int>(indices.size());
    b.d = data.d;
    b.inputs.resize(static_cast<std::size_t>(b.n) * b.d);
    b.labels.resize(b.n);
    for (int r = 0; r < b.n; ++r) {
        const double* src = data.row(indices[r]);
        std::copy(src, src + data.d, b.inputs.begin() + static_cast<std::size_t>(r) * b.d);
        b.labels[r] = data.labels[indices[r]];
    }
    return b;
}

Model::Model(int d_in, std::vector<int> hidden, int n_classes)
    : d_in_(d_in), hidden_(std::move(hidden)), n_classes_(n_classes) {
    if (d_in_ < 1) throw contract_error("model input dim must be >= 1");
    if (n_classes_ < 2) throw contract_error("model needs at least 2 classes");
    for (int h : hidden_) {
        if (h < 1) throw contract_error("hidden layer sizes must be >= 1");
    }
}

std::vector<int> Model::layer_sizes() const {
    std::vector<int> sizes;
    sizes.reserve(hidden_.size() + 2);
    sizes.push_back(d_in_);
    sizes.insert(sizes.end(), hidden_.begin(), hidden_.end());
    sizes.push_back(n_classes_);
    return sizes;
}

int Model::parameter_count() const {
    const auto sizes = layer_sizes();
    int total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        total += sizes[l] * sizes[l + 1] + sizes[l + 1];
    }
    return total;
}

ParameterVector init_params(const Model& model, Rng& rng) {
    ParameterVector params(static_cast<std::size_t>(model.parameter_count()));
    for (const auto& lay : layout(model)) {
        const double limit = std::sqrt(6.0 / lay.in);
        for (int j = 0; j < lay.out * lay.in; ++j) {
            params[lay.w_off + j] = rng.uniform(-limit, limit);
        }
        // biases stay zero
    }
    return params;
}

LossGrad loss_and_gradient(const Model& model, const ParameterVector& params, const Batch& batch) {
    require_batch(model, params, batch);
    const auto layers = layout(model);
    std::vector<std::vector<double>> act;
    forward(layers, params, batch, act);

    const int n = batch.n;
    const int n_classes = model.n_classes();
    LossGrad out;
    out.grad = ParameterVector(params.dim());

    // Softmax + cross-entropy; delta seeds the backward pass.
    std::vector<double> delta(static_cast<std::size_t>(n) * n_classes);
    std::vector<double> probs(n_classes);
    const auto& logits = act.back();
    double loss = 0.0;
    for (int r = 0; r < n; ++r) {
        std::span<const double> row(logits.data() + static_cast<std::size_t>(r) * n_classes,
                                    static_cast<std::size_t>(n_classes));
        loss += cross_entropy(row, batch.labels[r], probs.data());
        for (int c = 0; c < n_classes; ++c) {
            delta[static_cast<std::size_t>(r) * n_classes + c] =
                (probs[c] - (c == batch.labels[r] ? 1.0 : 0.0)) / n;
        }
    }
    out.loss = loss / n;
    if (!std::isfinite(out.loss)) throw numeric_error("non-finite value produced in softmax loss");

    const double* p = params.values().data();
    double* g = out.grad.values().data();
    std::vector<double> delta_prev;
    for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
        const auto& lay = layers[l];
        const double* x = act[l].data();
        for (int r = 0; r < n; ++r) {
            const double* xr = x + static_cast<std::size_t>(r) * lay.in;
            const double* dr = delta.data() + static_cast<std::size_t>(r) * lay.out;
            for (int o = 0; o < lay.out; ++o) {
                const double d = dr[o];
                if (d == 0.0) continue;
                double* gw = g + lay.w_off + static_cast<std::size_t>(o) * lay.in;
                for (int i = 0; i < lay.in; ++i) gw[i] += d * xr[i];
                g[lay.b_off + o] += d;
            }
        }
        if (l > 0) {
            delta_prev.assign(static_cast<std::size_t>(n) * lay.in, 0.0);
            for (int r = 0; r < n; ++r) {
                const double* dr = delta.data() + static_cast<std::size_t>(r) * lay.out;
                double* dp = delta_prev.data() + static_cast<std::size_t>(r) * lay.in;
                for (int o = 0; o < lay.out; ++o) {
                    const double d = dr[o];
                    if (d == 0.0) continue;
                    const double* w = p + lay.w_off + static_cast<std::size_t>(o) * lay.in;
                    for (int i = 0; i < lay.in; ++i) dp[i] += d * w[i];
                }
                // ReLU gate: activations of layer l are zero where the unit
                // was off, and the derivative there is zero.
                const double* ar = x + static_cast<std::size_t>(r) * lay.in;
                for (int i = 0; i < lay.in; ++i) {
                    if (ar[i] <= 0.0) dp[i] = 0.0;
                }
            }
            delta.swap(delta_prev);
        }
    }
    if (!out.grad.all_finite()) throw numeric_error("non-finite value produced in gradient");
    return out;
}

double loss_only(const Model& model, const ParameterVector& params, const Batch& batch) {
    require_batch(model, params, batch);
    const auto layers = layout(model);
    std::vector<std::vector<double>> act;
    forward(layers, params, batch, act);
    const int n_classes = model.n_classes();
    double loss = 0.0;
    for (int r = 0; r < batch.n; ++r) {
        std::span<const double> row(act.back().data() + static_cast<std::size_t>(r) * n_classes,
                                    static_cast<std::size_t>(n_classes));
        loss += cross_entropy(row, batch.labels[r], nullptr);
    }
    return loss / batch.n;
}

ParameterVector sgd_step(const ParameterVector& params, const ParameterVector& grad, double lr) {
    if (params.dim() != grad.dim()) {
        throw contract_error("sgd_step: parameter dim " + std::to_string(params.dim()) +
                             " does not match gradient dim " + std::to_string(grad.dim()));
    }
    if (!(lr > 0.0)) throw contract_error("sgd_step: lr must be > 0");
    ParameterVector out(params.dim());
    for (std::size_t i = 0; i < params.dim(); ++i) {
        out[i] = params[i] - lr * grad[i];
    }
    if (!out.all_finite()) throw numeric_error("sgd_step produced a non-finite parameter");
    return out;
}

ParameterVector local_train(const Model& model, const ParameterVector& start,
                            const Dataset& data, std::span<const int> indices,
                            const SgdOptions& opt, Rng& rng, std::uint64_t* steps_out) {
    if (indices.empty()) throw contract_error("local_train: device partition is empty");
    if (opt.epochs < 0) throw contract_error("local_train: epochs must be >= 0");
    if (opt.batch_size < 1) throw contract_error("local_train: batch_size must be >= 1");
    if (!(opt.lr >= 0.0)) throw contract_error("local_train: lr must be >= 0");
    if (opt.prox_mu > 0.0 && opt.prox_center == nullptr) {
        throw contract_error("local_train: prox_mu > 0 requires a prox center");
    }

    ParameterVector w = start;
    if (opt.epochs == 0) return w;

    std::vector<int> order(indices.begin(), indices.end());
    std::vector<double> grad_buf(w.dim());
    std::vector<double> velocity;
    if (opt.momentum != 0.0) velocity.assign(w.dim(), 0.0);

    const int n = static_cast<int>(order.size());
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        rng.shuffle(order);
        for (int begin = 0; begin < n; begin += opt.batch_size) {
            const int end = std::min(begin + opt.batch_size, n);
            const Batch batch = gather_batch(
                data, std::span<const int>(order.data() + begin, static_cast<std::size_t>(end - begin)));
            LossGrad lg = loss_and_gradient(model, w, batch);
            double* g = lg.grad.values().data();
            if (opt.prox_mu > 0.0) {
                const ParameterVector& c = *opt.prox_center;
                for (std::size_t i = 0; i < w.dim(); ++i) g[i] += opt.prox_mu * (w[i] - c[i]);
            }
            if (opt.momentum != 0.0) {
                for (std::size_t i = 0; i < w.dim(); ++i) {
                    velocity[i] = opt.momentum * velocity[i] + g[i];
                    w[i] -= opt.lr * velocity[i];
                }
            } else {
                for (std::size_t i = 0; i < w.dim(); ++i) w[i] -= opt.lr * g[i];
            }
            if (steps_out) ++*steps_out;
        }
    }
    if (!w.all_finite()) throw numeric_error("local_train produced non-finite parameters");
    return w;
}

ParameterVector weighted_average(std::span<const WeightedParams> entries) {
    if (entries.empty()) throw contract_error("weighted_average: no entries");
    double total = 0.0;
    const std::size_t dim = entries.front().params->dim();
    for (const auto& e : entries) {
        if (e.weight < 0.0) throw contract_error("weighted_average: negative weight");
        if (e.params->dim() != dim) throw contract_error("weighted_average: mismatched dims");
        total += e.weight;
    }
    if (!(total > 0.0)) throw contract_error("weighted_average: weights sum to zero");
    ParameterVector out(dim);
    for (const auto& e : entries) {
        const double coef = e.weight / total;
        if (coef == 0.0) continue;
        const double* p = e.params->values().data();
        double* o = out.values().data();
        for (std::size_t i = 0; i < dim; ++i) o[i] += coef * p[i];
    }
    if (!out.all_finite()) throw numeric_error("weighted_average produced a non-finite value");
    return out;
}

EvalResult evaluate(const Model& model, const ParameterVector& params, const Batch& test) {
    require_batch(model, params, test);
    const auto layers = layout(model);
    std::vector<std::vector<double>> act;
    forward(layers, params, test, act);
    const int n_classes = model.n_classes();
    int correct = 0;
    double loss = 0.0;
    for (int r = 0; r < test.n; ++r) {
        const double* row = act.back().data() + static_cast<std::size_t>(r) * n_classes;
        int best = 0;
        for (int c = 1; c < n_classes; ++c) {
            if (row[c] > row[best]) best = c;  // ties keep the lowest index
        }
        if (best == test.labels[r]) ++correct;
        loss += cross_entropy({row, static_cast<std::size_t>(n_classes)}, test.labels[r], nullptr);
    }
    return {static_cast<double>(correct) / test.n, loss / test.n};
}

EvalResult evaluate(const Model& model, const ParameterVector& params, const Dataset& test) {
    if (test.n < 1) throw contract_error("evaluate: test set is empty");
    return evaluate(model, params, full_batch(test));
}

}  // namespace fedsim
