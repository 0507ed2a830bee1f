#pragma once

#include <string>
#include <vector>

namespace fedsim {

struct CompareRow {
    std::string name;      // metrics file stem
    double final_accuracy = 0.0;
    double best_accuracy = 0.0;
    std::string cost_cell;  // transfer count or "not_reached"
};

struct Comparison {
    double target = 0.0;
    std::vector<CompareRow> rows;

    std::string to_text() const;
    std::string to_csv() const;
};

// Reads each metrics CSV and tabulates final/best accuracy and the
// communication cost to reach the target accuracy.
Comparison compare_runs(const std::vector<std::string>& metrics_files, double target);

}  // namespace fedsim
