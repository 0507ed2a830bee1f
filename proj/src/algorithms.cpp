#include "fedsim/algorithms.hpp"

#include <algorithm>
#include <future>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

void require_context(const TrainContext& ctx) {
    if (!ctx.model || !ctx.train || !ctx.partition || !ctx.device_rngs) {
        throw contract_error("train context is missing model, data, partition or rng streams");
    }
}

RoundTraffic traffic_for(const TrainContext& ctx, const RoundPlan& plan, Algorithm algo) {
    RoundTraffic traffic;
    traffic.algo = algo;
    traffic.n_sampled = static_cast<int>(plan.sampled.size());
    traffic.ring_rounds = ctx.cfg.ring_rounds;
    traffic.edge_period = ctx.cfg.edge_period;
    for (const auto& ring : plan.rings) {
        traffic.ring_sizes.push_back(static_cast<int>(ring.devices.size()));
    }
    return traffic;
}

// Runs fn(edge) for every edge, optionally on a small worker pool; results
// land at their edge index so aggregation order never depends on timing.
std::vector<ParameterVector> run_per_edge(int n_edges, bool parallel,
                                          const std::function<ParameterVector(int)>& fn) {
    std::vector<ParameterVector> results(static_cast<std::size_t>(n_edges));
    if (parallel && n_edges > 1) {
        std::vector<std::future<ParameterVector>> futures;
        futures.reserve(static_cast<std::size_t>(n_edges));
        for (int m = 0; m < n_edges; ++m) {
            futures.push_back(std::async(std::launch::async, fn, m));
        }
        for (int m = 0; m < n_edges; ++m) results[m] = futures[m].get();
    } else {
        for (int m = 0; m < n_edges; ++m) results[m] = fn(m);
    }
    return results;
}

}  // namespace

ParameterVector local_update(const TrainContext& ctx, int device, const ParameterVector& start,
                             double lr, const ParameterVector* prox_center) {
    require_context(ctx);
    SgdOptions opt;
    opt.epochs = ctx.cfg.local_epochs;
    opt.lr = lr;
    opt.batch_size = ctx.cfg.batch_size;
    opt.momentum = ctx.cfg.momentum;
    if (prox_center != nullptr && ctx.cfg.mu > 0.0) {
        opt.prox_mu = ctx.cfg.mu;
        opt.prox_center = prox_center;
    }
    std::uint64_t* steps = ctx.device_steps ? &(*ctx.device_steps)[device] : nullptr;
    return local_train(*ctx.model, start, *ctx.train, ctx.partition->device_indices[device], opt,
                       (*ctx.device_rngs)[device], steps);
}

ParameterVector ring_chain(const RingOrder& ring, ParameterVector w, double lr,
                           int ring_rounds, const LocalUpdateFn& update) {
    if (ring.devices.empty()) throw contract_error("ring_chain: ring is empty");
    if (ring_rounds < 1) throw contract_error("ring_chain: ring_rounds must be >= 1");
    // The model travels around the ring; pass r > 0 starts from the last
    // device's output of pass r - 1.
    for (int r = 0; r < ring_rounds; ++r) {
        for (int device : ring.devices) {
            w = update(device, w, lr);
        }
    }
    return w;
}

ParameterVector ring_optimization(const TrainContext& ctx, const RingOrder& ring,
                                  const ParameterVector& w_init, double lr) {
    require_context(ctx);
    return ring_chain(ring, w_init, lr, ctx.cfg.ring_rounds,
                      [&ctx](int device, const ParameterVector& w, double step_lr) {
                          return local_update(ctx, device, w, step_lr);
                      });
}

ParameterVector fedsr_round(const TrainContext& ctx, const RoundPlan& plan,
                            const ParameterVector& w_glob, double lr, CommLedger* ledger,
                            std::vector<ParameterVector>* edge_models_out) {
    require_context(ctx);
    const int n_edges = static_cast<int>(plan.rings.size());
    if (n_edges < 1) throw contract_error("fedsr_round: plan has no edges");

    auto edge_models = run_per_edge(n_edges, ctx.parallel_rings, [&](int m) {
        return ring_optimization(ctx, plan.rings[m], w_glob, lr);
    });

    std::vector<WeightedParams> entries;
    entries.reserve(edge_models.size());
    for (int m = 0; m < n_edges; ++m) {
        entries.push_back({&edge_models[m], static_cast<double>(plan.edge_weights[m])});
    }
    ParameterVector next = weighted_average(entries);
    if (ledger) charge_round(*ledger, traffic_for(ctx, plan, Algorithm::FedSR));
    if (edge_models_out) *edge_models_out = std::move(edge_models);
    return next;
}

ParameterVector fedavg_round(const TrainContext& ctx, const std::vector<int>& sampled,
                             const ParameterVector& w_glob, double lr, double mu,
                             CommLedger* ledger) {
    require_context(ctx);
    if (sampled.empty()) throw contract_error("fedavg_round: no sampled devices");
    std::vector<int> order = sampled;
    std::sort(order.begin(), order.end());

    std::vector<ParameterVector> models;
    models.reserve(order.size());
    for (int device : order) {
        models.push_back(mu > 0.0 ? fedprox_local_update(ctx, device, w_glob, mu, lr)
                                  : local_update(ctx, device, w_glob, lr));
    }
    std::vector<WeightedParams> entries;
    entries.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        entries.push_back({&models[i], static_cast<double>(ctx.partition->device_size(order[i]))});
    }
    ParameterVector next = weighted_average(entries);
    if (ledger) {
        RoundTraffic traffic;
        traffic.algo = mu > 0.0 ? Algorithm::FedProx : Algorithm::FedAvg;
        traffic.n_sampled = static_cast<int>(order.size());
        charge_round(*ledger, traffic);
    }
    return next;
}

ParameterVector fedprox_local_update(const TrainContext& ctx, int device,
                                     const ParameterVector& w_glob, double mu, double lr) {
    require_context(ctx);
    if (mu < 0.0) throw contract_error("fedprox_local_update: mu must be >= 0");
    if (mu == 0.0) return local_update(ctx, device, w_glob, lr);
    SgdOptions opt;
    opt.epochs = ctx.cfg.local_epochs;
    opt.lr = lr;
    opt.batch_size = ctx.cfg.batch_size;
    opt.momentum = ctx.cfg.momentum;
    opt.prox_mu = mu;
    opt.prox_center = &w_glob;
    std::uint64_t* steps = ctx.device_steps ? &(*ctx.device_steps)[device] : nullptr;
    return local_train(*ctx.model, w_glob, *ctx.train, ctx.partition->device_indices[device], opt,
                       (*ctx.device_rngs)[device], steps);
}

ParameterVector hierfavg_round(const TrainContext& ctx, const RoundPlan& plan,
                               const ParameterVector& w_glob, double lr, CommLedger* ledger,
                               std::vector<ParameterVector>* edge_models_out) {
    require_context(ctx);
    if (ctx.cfg.edge_period < 1) throw contract_error("hierfavg_round: edge_period must be >= 1");
    const int n_edges = static_cast<int>(plan.rings.size());
    if (n_edges < 1) throw contract_error("hierfavg_round: plan has no edges");

    auto edge_models = run_per_edge(n_edges, ctx.parallel_rings, [&](int m) {
        // Devices iterate in ascending id so the edge average accumulates in
        // canonical order.
        std::vector<int> devices = plan.rings[m].devices;
        std::sort(devices.begin(), devices.end());
        ParameterVector w_edge = w_glob;
        for (int it = 0; it < ctx.cfg.edge_period; ++it) {
            std::vector<ParameterVector> models;
            models.reserve(devices.size());
            for (int device : devices) {
                models.push_back(local_update(ctx, device, w_edge, lr));
            }
            std::vector<WeightedParams> entries;
            entries.reserve(devices.size());
            for (std::size_t i = 0; i < devices.size(); ++i) {
                entries.push_back(
                    {&models[i], static_cast<double>(ctx.partition->device_size(devices[i]))});
            }
            w_edge = weighted_average(entries);
        }
        return w_edge;
    });

    std::vector<WeightedParams> entries;
    entries.reserve(edge_models.size());
    for (int m = 0; m < n_edges; ++m) {
        entries.push_back({&edge_models[m], static_cast<double>(plan.edge_weights[m])});
    }
    ParameterVector next = weighted_average(entries);
    if (ledger) charge_round(*ledger, traffic_for(ctx, plan, Algorithm::HierFAvg));
    if (edge_models_out) *edge_models_out = std::move(edge_models);
    return next;
}

ParameterVector ring_round(const TrainContext& ctx, const RingOrder& ring,
                           const ParameterVector& w_glob, double lr, CommLedger* ledger) {
    require_context(ctx);
    ParameterVector next = ring_optimization(ctx, ring, w_glob, lr);
    if (ledger) {
        RoundTraffic traffic;
        traffic.algo = Algorithm::RingOpt;
        traffic.n_sampled = static_cast<int>(ring.devices.size());
        traffic.ring_sizes = {static_cast<int>(ring.devices.size())};
        traffic.ring_rounds = ctx.cfg.ring_rounds;
        charge_round(*ledger, traffic);
    }
    return next;
}

double estimate_gradient_bound(const Model& model, const Dataset& data,
                               const Partition& partition,
                               std::span<const ParameterVector> params_sample) {
    if (params_sample.empty()) {
        throw contract_error("estimate_gradient_bound: parameter sample is empty");
    }
    double bound = 0.0;
    for (const auto& params : params_sample) {
        for (int k = 0; k < partition.n_devices(); ++k) {
            const Batch device_batch = gather_batch(data, partition.device_indices[k]);
            const LossGrad lg = loss_and_gradient(model, params, device_batch);
            bound = std::max(bound, lg.grad.l2_norm());
        }
    }
    return bound;
}

}  // namespace fedsim
