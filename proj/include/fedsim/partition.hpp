#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedsim/dataset.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

// Assignment of dataset sample indices to devices. Index lists are pairwise
// disjoint, every device list is non-empty, and each class histogram row
// sums to the device size.
struct Partition {
    std::vector<std::vector<int>> device_indices;
    std::vector<std::vector<std::int64_t>> class_histograms;  // K x n_classes
    int n_classes = 0;
    std::string scheme;
    nlohmann::json params;  // scheme parameters, for export

    int n_devices() const { return static_cast<int>(device_indices.size()); }
    std::int64_t device_size(int k) const { return static_cast<std::int64_t>(device_indices[k].size()); }
    std::int64_t total_size() const;
};

// Device -> edge server map. Every device maps to exactly one edge and
// every edge hosts at least one device.
struct EdgeGrouping {
    int n_edges = 0;
    std::vector<int> edge_of_device;               // size K
    std::vector<std::vector<int>> devices_of_edge;  // size M, ascending ids
};

// Seeded uniform shuffle dealt round-robin; device sizes differ by <= 1.
Partition partition_iid(const Dataset& data, int n_devices, Rng& rng);

// Label-sorted dataset sliced into K*xi shards (ties in the sort broken by
// original index, remainder appended to the final shard); each device takes
// xi shards without replacement.
Partition partition_pathological(const Dataset& data, int n_devices, int xi, Rng& rng);

// Per class, split sample counts across devices by a Dir(alpha,...,alpha)
// draw with largest-remainder rounding. A draw that leaves any device empty
// is fully re-drawn, up to 100 attempts.
Partition partition_dirichlet(const Dataset& data, int n_devices, double alpha, Rng& rng);

// Throws contract_error when a Partition invariant does not hold.
void validate_partition(const Partition& partition, const Dataset& data);

// sum_m (|D_m| / |D|)^2 over edges; in (0, 1].
double edge_statistic(const EdgeGrouping& grouping, const Partition& partition);

nlohmann::json partition_to_json(const Partition& partition, std::uint64_t seed);

}  // namespace fedsim
