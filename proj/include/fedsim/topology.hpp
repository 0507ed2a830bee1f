#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "fedsim/partition.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

// One ring cluster for one round; the successor of the last device is the
// first (closure is implicit).
struct RingOrder {
    std::vector<int> devices;
};

// Everything one round needs from the planner: the sampled device set and,
// per edge, a fresh ring order plus the data weight |D_m| of the devices
// actually present this round.
struct RoundPlan {
    int round = 0;
    std::vector<int> sampled;                 // ascending device ids
    std::vector<RingOrder> rings;             // indexed by edge id
    std::vector<std::int64_t> edge_weights;   // |D_m| for this round
};

// Seeded-random balanced assignment; edge sizes differ by <= 1.
EdgeGrouping assign_edges(int n_devices, int n_edges, Rng& rng);

// Uniform sample without replacement of size round(fraction * K), returned
// ascending. The size must be at least min_sample (the number of edges that
// have to stay non-empty).
std::vector<int> sample_devices(int n_devices, double fraction, Rng& rng, int min_sample = 1);

// Permutes each edge's sampled devices into a ring. Throws empty_edge_error
// when some edge has no sampled device; the caller re-draws the sample.
RoundPlan form_rings(const EdgeGrouping& grouping, const Partition& partition,
                     const std::vector<int>& sampled, int round, Rng& rng);

// sample_devices + form_rings with up to 100 re-draws on empty edges.
RoundPlan plan_round(const EdgeGrouping& grouping, const Partition& partition,
                     double fraction, int round, Rng& rng);

nlohmann::json roundplan_to_json(const RoundPlan& plan);

}  // namespace fedsim
