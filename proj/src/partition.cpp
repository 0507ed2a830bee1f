#include "fedsim/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

void finalize(Partition& partition, const Dataset& data) {
    partition.n_classes = data.n_classes;
    partition.class_histograms.assign(partition.device_indices.size(),
                                      std::vector<std::int64_t>(data.n_classes, 0));
    for (std::size_t k = 0; k < partition.device_indices.size(); ++k) {
        auto& indices = partition.device_indices[k];
        std::sort(indices.begin(), indices.end());
        for (int idx : indices) {
            ++partition.class_histograms[k][data.labels[idx]];
        }
    }
}

}  // namespace

std::int64_t Partition::total_size() const {
    std::int64_t total = 0;
    for (const auto& d : device_indices) total += static_cast<std::int64_t>(d.size());
    return total;
}

Partition partition_iid(const Dataset& data, int n_devices, Rng& rng) {
    if (n_devices < 1) throw contract_error("partition_iid: need at least one device");
    if (data.n < n_devices) {
        throw contract_error("partition_iid: dataset smaller than device count");
    }
    std::vector<int> perm(data.n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);

    Partition partition;
    partition.scheme = "iid";
    partition.params = nlohmann::json::object();
    partition.device_indices.assign(n_devices, {});
    for (int i = 0; i < data.n; ++i) {
        partition.device_indices[i % n_devices].push_back(perm[i]);
    }
    finalize(partition, data);
    return partition;
}

Partition partition_pathological(const Dataset& data, int n_devices, int xi, Rng& rng) {
    if (n_devices < 1) throw contract_error("partition_pathological: need at least one device");
    if (xi < 1) throw contract_error("partition_pathological: xi must be >= 1");
    const int n_shards = n_devices * xi;
    if (n_shards > data.n) {
        throw contract_error("partition_pathological: K*xi shards exceed dataset size");
    }

    // Sort by label, ties by original index, then slice into equal shards;
    // the division remainder goes to the final shard.
    std::vector<int> order(data.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return data.labels[a] < data.labels[b]; });

    const int shard_size = data.n / n_shards;
    std::vector<int> shard_ids(n_shards);
    std::iota(shard_ids.begin(), shard_ids.end(), 0);
    rng.shuffle(shard_ids);

    Partition partition;
    partition.scheme = "pathological";
    partition.params = {{"xi", xi}};
    partition.device_indices.assign(n_devices, {});
    for (int k = 0; k < n_devices; ++k) {
        for (int s = 0; s < xi; ++s) {
            const int shard = shard_ids[static_cast<std::size_t>(k) * xi + s];
            const int begin = shard * shard_size;
            const int end = (shard == n_shards - 1) ? data.n : begin + shard_size;
            auto& dev = partition.device_indices[k];
            dev.insert(dev.end(), order.begin() + begin, order.begin() + end);
        }
    }
    finalize(partition, data);
    return partition;
}

Partition partition_dirichlet(const Dataset& data, int n_devices, double alpha, Rng& rng) {
    if (n_devices < 1) throw contract_error("partition_dirichlet: need at least one device");
    if (!(alpha > 0.0)) throw contract_error("partition_dirichlet: alpha must be > 0");

    std::vector<std::vector<int>> by_class(data.n_classes);
    for (int i = 0; i < data.n; ++i) by_class[data.labels[i]].push_back(i);

    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Partition partition;
        partition.scheme = "dirichlet";
        partition.params = {{"alpha", alpha}};
        partition.device_indices.assign(n_devices, {});

        for (int c = 0; c < data.n_classes; ++c) {
            std::vector<int> pool = by_class[c];
            rng.shuffle(pool);
            const auto proportions = rng.dirichlet(alpha, static_cast<std::size_t>(n_devices));

            // Largest-remainder rounding conserves the class total exactly.
            const std::int64_t n_c = static_cast<std::int64_t>(pool.size());
            std::vector<std::int64_t> counts(n_devices);
            std::vector<std::pair<double, int>> fractions(n_devices);
            std::int64_t assigned = 0;
            for (int k = 0; k < n_devices; ++k) {
                const double quota = proportions[k] * static_cast<double>(n_c);
                counts[k] = static_cast<std::int64_t>(quota);
                assigned += counts[k];
                fractions[k] = {quota - static_cast<double>(counts[k]), k};
            }
            std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (std::int64_t r = 0; r < n_c - assigned; ++r) {
                ++counts[fractions[static_cast<std::size_t>(r)].second];
            }

            std::size_t offset = 0;
            for (int k = 0; k < n_devices; ++k) {
                auto& dev = partition.device_indices[k];
                dev.insert(dev.end(), pool.begin() + offset, pool.begin() + offset + counts[k]);
                offset += static_cast<std::size_t>(counts[k]);
            }
        }

        const bool any_empty = std::any_of(partition.device_indices.begin(),
                                           partition.device_indices.end(),
                                           [](const auto& d) { return d.empty(); });
        if (!any_empty) {
            finalize(partition, data);
            return partition;
        }
    }
    throw contract_error("partition_dirichlet: no draw without empty devices in 100 attempts");
}

void validate_partition(const Partition& partition, const Dataset& data) {
    std::vector<char> seen(data.n, 0);
    for (int k = 0; k < partition.n_devices(); ++k) {
        const auto& indices = partition.device_indices[k];
        if (indices.empty()) {
            throw contract_error("partition invariant: device " + std::to_string(k) + " is empty");
        }
        std::int64_t hist_sum = 0;
        for (std::int64_t c : partition.class_histograms[k]) hist_sum += c;
        if (hist_sum != partition.device_size(k)) {
            throw contract_error("partition invariant: histogram of device " + std::to_string(k) +
                                 " does not sum to its size");
        }
        for (int idx : indices) {
            if (idx < 0 || idx >= data.n) {
                throw contract_error("partition invariant: index out of range");
            }
            if (seen[idx]) {
                throw contract_error("partition invariant: index " + std::to_string(idx) +
                                     " assigned to two devices");
            }
            seen[idx] = 1;
        }
    }
}

double edge_statistic(const EdgeGrouping& grouping, const Partition& partition) {
    if (grouping.n_edges < 1) throw contract_error("edge_statistic: need at least one edge");
    if (static_cast<int>(grouping.edge_of_device.size()) != partition.n_devices()) {
        throw contract_error("edge_statistic: grouping does not match partition");
    }
    std::vector<std::int64_t> edge_sizes(grouping.n_edges, 0);
    std::int64_t total = 0;
    for (int k = 0; k < partition.n_devices(); ++k) {
        edge_sizes[grouping.edge_of_device[k]] += partition.device_size(k);
        total += partition.device_size(k);
    }
    double stat = 0.0;
    for (std::int64_t s : edge_sizes) {
        const double w = static_cast<double>(s) / static_cast<double>(total);
        stat += w * w;
    }
    return stat;
}

nlohmann::json partition_to_json(const Partition& partition, std::uint64_t seed) {
    nlohmann::json j;
    j["seed"] = seed;
    j["scheme"] = partition.scheme;
    j["params"] = partition.params;
    auto& sizes = j["device_sizes"] = nlohmann::json::array();
    for (int k = 0; k < partition.n_devices(); ++k) sizes.push_back(partition.device_size(k));
    j["class_histograms"] = partition.class_histograms;
    return j;
}

}  // namespace fedsim
