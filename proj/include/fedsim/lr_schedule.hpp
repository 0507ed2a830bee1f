#pragma once

#include <string>
#include <vector>

namespace fedsim {

enum class ScheduleKind { Cosine, Harmonic, Constant };

struct LrSchedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double lr0 = 0.01;
    double lr_final = 0.0;   // cosine only
    int total_rounds = 1;    // cosine only

    static LrSchedule cosine(double lr0, double lr_final, int total_rounds);
    static LrSchedule harmonic(double lr0);
    static LrSchedule constant(double lr0);
};

// cosine: lr_final + 0.5 * (lr0 - lr_final) * (1 + cos(pi * t / (T - 1))),
//         defined for 0 <= t < T
// harmonic: lr0 / (1 + t)
// constant: lr0
double lr_at(const LrSchedule& schedule, int t);

// Step-size conditions required for convergence: eta_t -> 0, sum eta_t
// diverges, sum eta_t^2 converges. Decided symbolically per schedule kind;
// a cosine schedule is treated as extended past its horizon by lr_final.
struct ScheduleAudit {
    bool limit_is_zero = false;
    bool sum_diverges = false;
    bool sum_sq_converges = false;
    bool passes = false;
    std::vector<std::string> failed;  // names of violated conditions
};

ScheduleAudit audit_schedule(const LrSchedule& schedule);

std::string schedule_kind_name(ScheduleKind kind);

}  // namespace fedsim
