#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fedsim/comm_ledger.hpp"
#include "fedsim/model.hpp"
#include "fedsim/partition.hpp"
#include "fedsim/topology.hpp"

namespace fedsim {

struct AlgoConfig {
    Algorithm algo = Algorithm::FedAvg;
    int local_epochs = 1;   // E
    int ring_rounds = 1;    // R
    double mu = 0.0;        // fedprox proximal coefficient
    int edge_period = 1;    // hierfavg edge aggregation period
    int batch_size = 32;
    double momentum = 0.5;
};

// Shared state for one training run. Device RNG streams are owned by the
// caller and indexed by device id; rings touching disjoint devices may run
// concurrently.
struct TrainContext {
    const Model* model = nullptr;
    const Dataset* train = nullptr;
    const Partition* partition = nullptr;
    AlgoConfig cfg;
    std::vector<Rng>* device_rngs = nullptr;
    std::vector<std::uint64_t>* device_steps = nullptr;  // optional instrumentation
    bool parallel_rings = false;
};

// E epochs of mini-batch SGD on one device's data. prox_center, when given,
// adds cfg.mu * (w - center) to every gradient step.
ParameterVector local_update(const TrainContext& ctx, int device, const ParameterVector& start,
                             double lr, const ParameterVector* prox_center = nullptr);

// One device step of an abstract ring pass; lets the ring/aggregation logic
// run against scalar test objectives as well as real models.
using LocalUpdateFn = std::function<ParameterVector(int device, const ParameterVector& w, double lr)>;

// ring_rounds sequential passes around the ring: each device trains from
// its predecessor's output, and the first device of pass r > 0 continues
// from the last device of pass r - 1.
ParameterVector ring_chain(const RingOrder& ring, ParameterVector w, double lr,
                           int ring_rounds, const LocalUpdateFn& update);

// ring_chain over real devices, E epochs per visit.
ParameterVector ring_optimization(const TrainContext& ctx, const RingOrder& ring,
                                  const ParameterVector& w_init, double lr);

// One global round: broadcast w_glob to every edge, run each edge's ring,
// then data-weighted average of the edge models in canonical edge order.
// edge_models_out, when given, receives the per-edge results.
ParameterVector fedsr_round(const TrainContext& ctx, const RoundPlan& plan,
                            const ParameterVector& w_glob, double lr,
                            CommLedger* ledger = nullptr,
                            std::vector<ParameterVector>* edge_models_out = nullptr);

// Every sampled device trains E epochs from w_glob; data-weighted average
// in ascending device order. mu > 0 turns the local step proximal (fedprox).
ParameterVector fedavg_round(const TrainContext& ctx, const std::vector<int>& sampled,
                             const ParameterVector& w_glob, double lr, double mu = 0.0,
                             CommLedger* ledger = nullptr);

// Fedprox local solver: fedavg's local step plus mu * (w - w_glob).
ParameterVector fedprox_local_update(const TrainContext& ctx, int device,
                                     const ParameterVector& w_glob, double mu, double lr);

// Per edge: edge_period iterations of (all edge devices train E epochs from
// the edge model -> edge average); then a cloud average across edges.
ParameterVector hierfavg_round(const TrainContext& ctx, const RoundPlan& plan,
                               const ParameterVector& w_glob, double lr,
                               CommLedger* ledger = nullptr,
                               std::vector<ParameterVector>* edge_models_out = nullptr);

// Flat ring over all sampled devices (no cloud aggregation); the model that
// completes the last pass is the next global model.
ParameterVector ring_round(const TrainContext& ctx, const RingOrder& ring,
                           const ParameterVector& w_glob, double lr,
                           CommLedger* ledger = nullptr);

// Max over the parameter sample and devices of the full-device gradient
// norm; an empirical lower bound for the gradient-bound constant.
double estimate_gradient_bound(const Model& model, const Dataset& data,
                               const Partition& partition,
                               std::span<const ParameterVector> params_sample);

}  // namespace fedsim
