#include "fedsim/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "fedsim/errors.hpp"
#include "fedsim/metrics.hpp"

namespace fedsim {

namespace {

std::string fmt_acc(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string Comparison::to_text() const {
    std::size_t name_w = 4;
    for (const auto& row : rows) name_w = std::max(name_w, row.name.size());
    std::ostringstream os;
    char head[128];
    std::snprintf(head, sizeof(head), "%-*s  %9s  %9s  cost_to_%.4g\n",
                  static_cast<int>(name_w), "run", "final_acc", "best_acc", target);
    os << head;
    for (const auto& row : rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-*s  %9s  %9s  %s\n", static_cast<int>(name_w),
                      row.name.c_str(), fmt_acc(row.final_accuracy).c_str(),
                      fmt_acc(row.best_accuracy).c_str(), row.cost_cell.c_str());
        os << line;
    }
    return os.str();
}

std::string Comparison::to_csv() const {
    std::ostringstream os;
    char head[64];
    std::snprintf(head, sizeof(head), "run,final_accuracy,best_accuracy,cost_to_%.4g\n", target);
    os << head;
    for (const auto& row : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", row.final_accuracy, row.best_accuracy);
        os << row.name << ',' << buf << row.cost_cell << '\n';
    }
    return os.str();
}

Comparison compare_runs(const std::vector<std::string>& metrics_files, double target) {
    if (metrics_files.empty()) throw contract_error("compare_runs: no metrics files given");
    Comparison cmp;
    cmp.target = target;
    for (const auto& file : metrics_files) {
        const auto records = read_metrics_csv(file);
        CompareRow row;
        const std::filesystem::path path(file);
        // Run outputs are all named metrics.csv; the run directory is the
        // distinguishing name.
        row.name = path.stem() == "metrics" && path.has_parent_path()
                       ? path.parent_path().filename().string()
                       : path.stem().string();
        for (const auto& rec : records) {
            if (rec.round < 0) continue;
            row.best_accuracy = std::max(row.best_accuracy, rec.accuracy);
            row.final_accuracy = rec.accuracy;
        }
        const auto cost = cost_to_target(records, target);
        row.cost_cell = cost ? std::to_string(*cost) : "not_reached";
        cmp.rows.push_back(std::move(row));
    }
    return cmp;
}

}  // namespace fedsim
