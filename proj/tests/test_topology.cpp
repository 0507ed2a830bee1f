#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fedsim/errors.hpp"
#include "fedsim/topology.hpp"

using namespace fedsim;

namespace {

Partition uniform_partition(int K, int per_device) {
    Partition partition;
    partition.scheme = "hand";
    partition.params = nlohmann::json::object();
    partition.n_classes = 2;
    int next = 0;
    for (int k = 0; k < K; ++k) {
        std::vector<int> idx(per_device);
        std::iota(idx.begin(), idx.end(), next);
        next += per_device;
        partition.device_indices.push_back(std::move(idx));
        partition.class_histograms.push_back({per_device, 0});
    }
    return partition;
}

}  // namespace

TEST_CASE("assign_edges balances devices over edges") {
    SUBCASE("20 devices over 5 edges -> 4 each") {
        Rng rng(1);
        const auto grouping = assign_edges(20, 5, rng);
        for (const auto& devices : grouping.devices_of_edge) CHECK(devices.size() == 4);
        std::set<int> seen;
        for (const auto& devices : grouping.devices_of_edge) {
            for (int id : devices) seen.insert(id);
        }
        CHECK(seen.size() == 20);
    }
    SUBCASE("one edge holds everything") {
        Rng rng(2);
        const auto grouping = assign_edges(6, 1, rng);
        CHECK(grouping.devices_of_edge[0].size() == 6);
    }
    SUBCASE("7 devices over 3 edges -> sizes are a permutation of (3,2,2)") {
        Rng rng(3);
        const auto grouping = assign_edges(7, 3, rng);
        std::vector<std::size_t> sizes;
        for (const auto& devices : grouping.devices_of_edge) sizes.push_back(devices.size());
        std::sort(sizes.begin(), sizes.end());
        CHECK(sizes == std::vector<std::size_t>{2, 2, 3});
    }
    SUBCASE("more edges than devices is rejected") {
        Rng rng(4);
        CHECK_THROWS_AS(assign_edges(3, 4, rng), contract_error);
    }
}

TEST_CASE("sample_devices") {
    SUBCASE("fraction 1 keeps everyone") {
        Rng rng(5);
        const auto sampled = sample_devices(10, 1.0, rng);
        CHECK(sampled.size() == 10);
    }
    SUBCASE("100 devices at fraction 0.2 -> exactly 20") {
        Rng rng(6);
        CHECK(sample_devices(100, 0.2, rng).size() == 20);
    }
    SUBCASE("inclusion frequency stays within 3 sigma of the fraction") {
        const int K = 10;
        const double fraction = 0.3;
        std::vector<int> hits(K, 0);
        Rng rng(7);
        const int draws = 4000;
        for (int t = 0; t < draws; ++t) {
            for (int id : sample_devices(K, fraction, rng)) ++hits[id];
        }
        const double sigma = std::sqrt(fraction * (1.0 - fraction) / draws);
        for (int k = 0; k < K; ++k) {
            const double freq = static_cast<double>(hits[k]) / draws;
            CHECK(std::abs(freq - fraction) <= 3.0 * sigma);
        }
    }
    SUBCASE("a sample too small for the edges is rejected") {
        Rng rng(8);
        CHECK_THROWS_AS(sample_devices(10, 0.1, rng, 2), contract_error);
        CHECK_THROWS_AS(sample_devices(10, 0.0, rng), contract_error);
        CHECK_THROWS_AS(sample_devices(10, 1.5, rng), contract_error);
    }
}

TEST_CASE("form_rings") {
    const auto partition = uniform_partition(8, 10);
    Rng grouping_rng(9);
    const auto grouping = assign_edges(8, 2, grouping_rng);

    SUBCASE("covers the sampled set exactly, weights follow participation") {
        Rng rng(10);
        std::vector<int> sampled(8);
        std::iota(sampled.begin(), sampled.end(), 0);
        const auto plan = form_rings(grouping, partition, sampled, 0, rng);
        std::set<int> in_rings;
        for (const auto& ring : plan.rings) {
            for (int id : ring.devices) CHECK(in_rings.insert(id).second);
        }
        CHECK(in_rings == std::set<int>(sampled.begin(), sampled.end()));
        std::int64_t weight_total = 0;
        for (auto w : plan.edge_weights) weight_total += w;
        CHECK(weight_total == 80);
    }
    SUBCASE("an edge with one sampled device yields a self-loop ring") {
        EdgeGrouping lone;
        lone.n_edges = 2;
        lone.edge_of_device = {0, 0, 0, 0, 0, 0, 0, 1};
        lone.devices_of_edge = {{0, 1, 2, 3, 4, 5, 6}, {7}};
        Rng rng(11);
        std::vector<int> sampled = {0, 7};
        const auto plan = form_rings(lone, partition, sampled, 0, rng);
        CHECK(plan.rings[1].devices == std::vector<int>{7});
        CHECK(plan.edge_weights[1] == 10);
    }
    SUBCASE("an empty edge demands a resample") {
        Rng rng(12);
        const std::vector<int> sampled = {grouping.devices_of_edge[0][0]};
        CHECK_THROWS_AS(form_rings(grouping, partition, sampled, 0, rng), empty_edge_error);
    }
    SUBCASE("successive rounds reshuffle the ring order") {
        Rng rng(13);
        std::vector<int> sampled(8);
        std::iota(sampled.begin(), sampled.end(), 0);
        int changed = 0;
        auto prev = form_rings(grouping, partition, sampled, 0, rng);
        for (int round = 1; round <= 100; ++round) {
            auto cur = form_rings(grouping, partition, sampled, round, rng);
            if (cur.rings[0].devices != prev.rings[0].devices) ++changed;
            prev = std::move(cur);
        }
        // A 4-device ring repeats its order with probability 1/24.
        CHECK(changed >= 90);
    }
}

TEST_CASE("plan_round resamples until every edge is covered") {
    const auto partition = uniform_partition(4, 5);
    EdgeGrouping grouping;
    grouping.n_edges = 2;
    grouping.edge_of_device = {0, 0, 0, 1};
    grouping.devices_of_edge = {{0, 1, 2}, {3}};
    Rng rng(14);
    // fraction 0.5 -> 2 devices; many draws miss edge 1 and must retry.
    const auto plan = plan_round(grouping, partition, 0.5, 0, rng);
    CHECK(plan.sampled.size() == 2);
    for (const auto& ring : plan.rings) CHECK(!ring.devices.empty());
}

TEST_CASE("round plans are deterministic given seed and round") {
    const auto partition = uniform_partition(9, 4);
    Rng g1(15), g2(15);
    const auto grouping1 = assign_edges(9, 3, g1);
    const auto grouping2 = assign_edges(9, 3, g2);
    CHECK(grouping1.edge_of_device == grouping2.edge_of_device);

    Rng r1(16), r2(16);
    for (int round = 0; round < 5; ++round) {
        const auto p1 = plan_round(grouping1, partition, 1.0, round, r1);
        const auto p2 = plan_round(grouping2, partition, 1.0, round, r2);
        CHECK(p1.sampled == p2.sampled);
        CHECK(p1.edge_weights == p2.edge_weights);
        for (std::size_t m = 0; m < p1.rings.size(); ++m) {
            CHECK(p1.rings[m].devices == p2.rings[m].devices);
        }
    }
}

TEST_CASE("round plan JSON export") {
    const auto partition = uniform_partition(4, 3);
    Rng grouping_rng(17);
    const auto grouping = assign_edges(4, 2, grouping_rng);
    Rng rng(18);
    const auto plan = plan_round(grouping, partition, 1.0, 7, rng);
    const auto j = roundplan_to_json(plan);
    CHECK(j.at("round") == 7);
    CHECK(j.at("sampled").size() == 4);
    CHECK(j.at("rings").size() == 2);
    CHECK(j.at("edge_weights").size() == 2);
}
