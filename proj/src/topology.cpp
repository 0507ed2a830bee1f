#include "fedsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

EdgeGrouping assign_edges(int n_devices, int n_edges, Rng& rng) {
    if (n_edges < 1) throw contract_error("assign_edges: need at least one edge");
    if (n_devices < n_edges) {
        throw contract_error("assign_edges: more edges than devices (" + std::to_string(n_edges) +
                             " > " + std::to_string(n_devices) + ")");
    }
    std::vector<int> perm(n_devices);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);

    EdgeGrouping grouping;
    grouping.n_edges = n_edges;
    grouping.edge_of_device.assign(n_devices, 0);
    grouping.devices_of_edge.assign(n_edges, {});
    for (int i = 0; i < n_devices; ++i) {
        const int m = i % n_edges;
        grouping.edge_of_device[perm[i]] = m;
        grouping.devices_of_edge[m].push_back(perm[i]);
    }
    for (auto& devices : grouping.devices_of_edge) {
        std::sort(devices.begin(), devices.end());
    }
    return grouping;
}

std::vector<int> sample_devices(int n_devices, double fraction, Rng& rng, int min_sample) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw contract_error("sample_devices: fraction must be in (0, 1]");
    }
    const int count = static_cast<int>(std::lround(fraction * n_devices));
    if (count < min_sample) {
        throw contract_error("sample_devices: round(fraction*K) = " + std::to_string(count) +
                             " is below the required minimum " + std::to_string(min_sample));
    }
    std::vector<int> perm(n_devices);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<int> sampled(perm.begin(), perm.begin() + count);
    std::sort(sampled.begin(), sampled.end());
    return sampled;
}

RoundPlan form_rings(const EdgeGrouping& grouping, const Partition& partition,
                     const std::vector<int>& sampled, int round, Rng& rng) {
    RoundPlan plan;
    plan.round = round;
    plan.sampled = sampled;
    std::sort(plan.sampled.begin(), plan.sampled.end());
    plan.rings.assign(grouping.n_edges, {});
    plan.edge_weights.assign(grouping.n_edges, 0);

    for (int id : plan.sampled) {
        if (id < 0 || id >= static_cast<int>(grouping.edge_of_device.size())) {
            throw contract_error("form_rings: sampled device id out of range");
        }
        const int m = grouping.edge_of_device[id];
        plan.rings[m].devices.push_back(id);
        plan.edge_weights[m] += partition.device_size(id);
    }
    for (int m = 0; m < grouping.n_edges; ++m) {
        if (plan.rings[m].devices.empty()) {
            throw empty_edge_error("edge " + std::to_string(m) +
                                   " has no sampled device this round; re-draw the sample");
        }
        rng.shuffle(plan.rings[m].devices);
    }
    return plan;
}

RoundPlan plan_round(const EdgeGrouping& grouping, const Partition& partition,
                     double fraction, int round, Rng& rng) {
    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const auto sampled = sample_devices(static_cast<int>(grouping.edge_of_device.size()),
                                            fraction, rng, grouping.n_edges);
        try {
            return form_rings(grouping, partition, sampled, round, rng);
        } catch (const empty_edge_error&) {
            // resample
        }
    }
    throw contract_error("plan_round: no sample covered every edge in 100 attempts");
}

nlohmann::json roundplan_to_json(const RoundPlan& plan) {
    nlohmann::json j;
    j["round"] = plan.round;
    j["sampled"] = plan.sampled;
    auto& rings = j["rings"] = nlohmann::json::array();
    for (const auto& ring : plan.rings) rings.push_back(ring.devices);
    j["edge_weights"] = plan.edge_weights;
    return j;
}

}  // namespace fedsim
