#include "fedsim/metrics.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

// %.17g round-trips doubles exactly, which keeps metrics files byte-stable.
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr const char* kHeader = "round,accuracy,loss,lr,cum_transfers";

}  // namespace

std::optional<std::uint64_t> cost_to_target(std::span<const RoundRecord> records, double target) {
    for (const auto& rec : records) {
        if (rec.round < 0) continue;  // untrained baseline
        if (rec.accuracy >= target) return rec.cum_transfers;
    }
    return std::nullopt;
}

void emit_metrics(std::span<const RoundRecord> records, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw io_error("cannot write metrics file: " + csv_path.string());
    out << kHeader << '\n';
    for (const auto& rec : records) {
        out << rec.round << ',' << fmt_double(rec.accuracy) << ',' << fmt_double(rec.loss) << ','
            << fmt_double(rec.lr) << ',' << rec.cum_transfers << '\n';
    }
    if (!out) throw io_error("failed while writing metrics file: " + csv_path.string());
}

std::vector<RoundRecord> read_metrics_csv(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw io_error("cannot open metrics file: " + csv_path.string());
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw io_error("malformed metrics file (bad header): " + csv_path.string());
    }
    std::vector<RoundRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RoundRecord rec;
        char* end = nullptr;
        const char* s = line.c_str();
        rec.round = static_cast<int>(std::strtol(s, &end, 10));
        auto expect_comma = [&]() {
            if (!end || *end != ',') {
                throw io_error("malformed metrics row in " + csv_path.string() + ": " + line);
            }
            s = end + 1;
        };
        expect_comma();
        rec.accuracy = std::strtod(s, &end);
        expect_comma();
        rec.loss = std::strtod(s, &end);
        expect_comma();
        rec.lr = std::strtod(s, &end);
        expect_comma();
        rec.cum_transfers = std::strtoull(s, &end, 10);
        if (end == s) {
            throw io_error("malformed metrics row in " + csv_path.string() + ": " + line);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

nlohmann::json run_summary(std::span<const RoundRecord> records,
                           std::span<const double> targets,
                           const CommLedger& ledger, Algorithm algo) {
    nlohmann::json j;
    double best = 0.0;
    double final_acc = 0.0;
    for (const auto& rec : records) {
        if (rec.round < 0) continue;
        best = std::max(best, rec.accuracy);
        final_acc = rec.accuracy;
    }
    j["final_accuracy"] = final_acc;
    j["best_accuracy"] = best;
    auto& costs = j["cost_to_targets"] = nlohmann::json::object();
    for (double target : targets) {
        const auto cost = cost_to_target(records, target);
        char key[32];
        std::snprintf(key, sizeof(key), "%.4g", target);
        if (cost) {
            costs[key] = *cost;
        } else {
            costs[key] = "not_reached";
        }
    }
    j["comm"] = ledger.to_json();
    j["comm_model"] = comm_model_description(algo);
    return j;
}

}  // namespace fedsim
