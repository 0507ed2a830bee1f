#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "fedsim/audit.hpp"
#include "fedsim/config.hpp"
#include "fedsim/metrics.hpp"

namespace fedsim {

// Independent named RNG streams derived from one master seed; see
// make_stream for the splitting scheme. Stream names are "dataset",
// "partition", "topology", "init" and "device_<k>".
struct StreamSet {
    Rng dataset;
    Rng partition;
    Rng topology;
    Rng init;
    std::vector<Rng> devices;
};

StreamSet seed_streams(std::uint64_t master_seed, int n_devices);

struct RunResult {
    std::vector<RoundRecord> records;
    CommLedger ledger;
    ConvergenceAudit e_audit;
    LemmaAuditLog lemma_log;   // empty unless the lemma audit ran
    ParameterVector final_params;
    nlohmann::json manifest;
    std::filesystem::path out_dir;
    std::filesystem::path metrics_csv;
};

// Runs the configured experiment: builds data, partition and topology,
// executes config.rounds training rounds with a round -1 baseline
// evaluation, and writes metrics.csv, summary.json, manifest.json,
// partition.json, plans.jsonl and (for fedsr with auditing) audit.json
// under config.out_dir.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace fedsim
