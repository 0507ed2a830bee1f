#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fedsim {

enum class Algorithm { FedAvg, FedProx, FedSR, HierFAvg, RingOpt };

std::string algorithm_name(Algorithm algo);
Algorithm algorithm_from_name(const std::string& name);

// Count of whole-model transfers per link direction. The unit is one model
// crossing one link once.
struct CommLedger {
    std::uint64_t cloud_to_edge = 0;
    std::uint64_t edge_to_cloud = 0;
    std::uint64_t cloud_to_device = 0;
    std::uint64_t device_to_cloud = 0;
    std::uint64_t edge_to_device = 0;
    std::uint64_t device_to_edge = 0;
    std::uint64_t device_to_device = 0;

    std::uint64_t total() const;
    nlohmann::json to_json() const;
};

// What one round moved, reduced to the numbers the traffic model needs.
struct RoundTraffic {
    Algorithm algo = Algorithm::FedAvg;
    int n_sampled = 0;                // participating devices
    std::vector<int> ring_sizes;      // per edge (fedsr/hierfavg/ring)
    int ring_rounds = 1;              // R
    int edge_period = 1;              // hierfavg
};

// Per-round traffic model, in whole-model transfers:
//   fedavg / fedprox : |sampled| cloud->device + |sampled| device->cloud
//   fedsr            : M cloud->edge, per edge |ring| edge->device and
//                      |ring|*R device->device hand-offs, M edge->cloud
//   hierfavg         : M cloud->edge + M edge->cloud, plus per edge
//                      iteration (edge_period of them) |devices| down and
//                      |devices| up on the edge<->device links
//   ring (flat)      : |ring|*R device->device + 1 device->cloud
void charge_round(CommLedger& ledger, const RoundTraffic& traffic);

// The model above, as text for run summaries.
std::string comm_model_description(Algorithm algo);

}  // namespace fedsim
