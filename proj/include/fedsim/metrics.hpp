#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "fedsim/comm_ledger.hpp"

namespace fedsim {

// One evaluated round. Round -1 is the untrained baseline.
struct RoundRecord {
    int round = 0;
    double accuracy = 0.0;
    double loss = 0.0;
    double lr = 0.0;
    std::uint64_t cum_transfers = 0;
    std::vector<double> edge_distances;  // diagnostic, not part of the CSV
};

// Cumulative transfers at the first trained round (t >= 0) whose accuracy
// reaches the target; nullopt when never reached.
std::optional<std::uint64_t> cost_to_target(std::span<const RoundRecord> records, double target);

// CSV with header round,accuracy,loss,lr,cum_transfers; doubles printed
// with %.17g so values round-trip exactly.
void emit_metrics(std::span<const RoundRecord> records, const std::filesystem::path& csv_path);

std::vector<RoundRecord> read_metrics_csv(const std::filesystem::path& csv_path);

// {final_accuracy, best_accuracy, cost_to_targets, comm:{counters}, comm_model}
nlohmann::json run_summary(std::span<const RoundRecord> records,
                           std::span<const double> targets,
                           const CommLedger& ledger, Algorithm algo);

}  // namespace fedsim
