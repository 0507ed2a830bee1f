#include "fedsim/comm_ledger.hpp"

#include "fedsim/errors.hpp"

namespace fedsim {

std::string algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::FedAvg: return "fedavg";
        case Algorithm::FedProx: return "fedprox";
        case Algorithm::FedSR: return "fedsr";
        case Algorithm::HierFAvg: return "hierfavg";
        case Algorithm::RingOpt: return "ring";
    }
    return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "fedavg") return Algorithm::FedAvg;
    if (name == "fedprox") return Algorithm::FedProx;
    if (name == "fedsr") return Algorithm::FedSR;
    if (name == "hierfavg") return Algorithm::HierFAvg;
    if (name == "ring") return Algorithm::RingOpt;
    throw contract_error("unknown algorithm '" + name +
                         "' (expected fedavg, fedprox, fedsr, hierfavg or ring)");
}

std::uint64_t CommLedger::total() const {
    return cloud_to_edge + edge_to_cloud + cloud_to_device + device_to_cloud + edge_to_device +
           device_to_edge + device_to_device;
}

nlohmann::json CommLedger::to_json() const {
    return {
        {"cloud_to_edge", cloud_to_edge},     {"edge_to_cloud", edge_to_cloud},
        {"cloud_to_device", cloud_to_device}, {"device_to_cloud", device_to_cloud},
        {"edge_to_device", edge_to_device},   {"device_to_edge", device_to_edge},
        {"device_to_device", device_to_device}, {"total", total()},
    };
}

void charge_round(CommLedger& ledger, const RoundTraffic& traffic) {
    if (traffic.n_sampled < 1) {
        throw contract_error("charge_round: a round must involve at least one device");
    }
    const auto n_sampled = static_cast<std::uint64_t>(traffic.n_sampled);
    switch (traffic.algo) {
        case Algorithm::FedAvg:
        case Algorithm::FedProx:
            ledger.cloud_to_device += n_sampled;
            ledger.device_to_cloud += n_sampled;
            return;
        case Algorithm::FedSR: {
            if (traffic.ring_sizes.empty()) {
                throw contract_error("charge_round: fedsr needs per-edge ring sizes");
            }
            if (traffic.ring_rounds < 1) {
                throw contract_error("charge_round: fedsr ring_rounds must be >= 1");
            }
            const auto n_edges = static_cast<std::uint64_t>(traffic.ring_sizes.size());
            ledger.cloud_to_edge += n_edges;
            ledger.edge_to_cloud += n_edges;
            for (int size : traffic.ring_sizes) {
                if (size < 1) throw contract_error("charge_round: empty ring");
                ledger.edge_to_device += static_cast<std::uint64_t>(size);
                ledger.device_to_device +=
                    static_cast<std::uint64_t>(size) * static_cast<std::uint64_t>(traffic.ring_rounds);
            }
            return;
        }
        case Algorithm::HierFAvg: {
            if (traffic.ring_sizes.empty()) {
                throw contract_error("charge_round: hierfavg needs per-edge device counts");
            }
            if (traffic.edge_period < 1) {
                throw contract_error("charge_round: hierfavg edge_period must be >= 1");
            }
            const auto n_edges = static_cast<std::uint64_t>(traffic.ring_sizes.size());
            const auto period = static_cast<std::uint64_t>(traffic.edge_period);
            ledger.cloud_to_edge += n_edges;
            ledger.edge_to_cloud += n_edges;
            ledger.edge_to_device += period * n_sampled;
            ledger.device_to_edge += period * n_sampled;
            return;
        }
        case Algorithm::RingOpt: {
            if (traffic.ring_sizes.size() != 1) {
                throw contract_error("charge_round: flat ring expects exactly one ring");
            }
            if (traffic.ring_rounds < 1) {
                throw contract_error("charge_round: ring_rounds must be >= 1");
            }
            ledger.device_to_device += static_cast<std::uint64_t>(traffic.ring_sizes[0]) *
                                       static_cast<std::uint64_t>(traffic.ring_rounds);
            ledger.device_to_cloud += 1;
            return;
        }
    }
    throw contract_error("charge_round: unknown algorithm");
}

std::string comm_model_description(Algorithm algo) {
    switch (algo) {
        case Algorithm::FedAvg:
        case Algorithm::FedProx:
            return "per round: |sampled| cloud->device + |sampled| device->cloud";
        case Algorithm::FedSR:
            return "per round: M cloud->edge + M edge->cloud + sum_m |ring_m| edge->device "
                   "+ sum_m |ring_m|*R device->device";
        case Algorithm::HierFAvg:
            return "per round: M cloud->edge + M edge->cloud + edge_period * "
                   "(|sampled| edge->device + |sampled| device->edge)";
        case Algorithm::RingOpt:
            return "per round: |ring|*R device->device + 1 device->cloud";
    }
    return "";
}

}  // namespace fedsim
