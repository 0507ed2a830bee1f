#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedsim/algorithms.hpp"
#include "fedsim/lr_schedule.hpp"

namespace fedsim {

struct SyntheticSpec {
    int n_train = 0;
    int n_test = 0;
    int d = 0;
    int n_classes = 0;
    double separation = 1.0;
};

struct IdxSpec {
    std::string train_images, train_labels, test_images, test_labels;
    // When > 0, train on a seeded uniform subset of this many samples.
    int subset_train = 0;
};

struct DatasetSpec {
    bool is_idx = false;
    SyntheticSpec synthetic;
    IdxSpec idx;
};

struct PartitionSpec {
    std::string scheme = "iid";  // iid | pathological | dirichlet
    int xi = 1;
    double alpha = 1.0;
};

struct ModelSpec {
    std::string arch = "mlp";  // linear | mlp
    std::vector<int> hidden;
};

// A fully resolved experiment: defaults applied, every value validated.
struct ExperimentConfig {
    int schema_version = 1;
    DatasetSpec dataset;
    int devices = 0;      // K
    int edges = 1;        // M
    PartitionSpec partition;
    ModelSpec model;
    Algorithm algorithm = Algorithm::FedAvg;
    AlgoConfig algo;      // E, R, mu, edge_period, batch_size, momentum
    int rounds = 0;       // T
    LrSchedule lr_schedule;
    double sample_fraction = 1.0;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool parallel_rings = false;
    bool audit_lemma = false;  // defaults on for fedsr
    std::vector<double> eval_targets = {0.5, 0.8, 0.9, 0.95};

    nlohmann::json to_json() const;  // resolved echo, reproduces the run
};

// Strict parse: unknown keys are rejected (with a nearest-key suggestion),
// missing required keys and bad types name the key and the expectation.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& raw_text = "");

}  // namespace fedsim
