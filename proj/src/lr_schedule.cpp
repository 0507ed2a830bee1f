#include "fedsim/lr_schedule.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

LrSchedule LrSchedule::cosine(double lr0, double lr_final, int total_rounds) {
    if (!(lr0 > 0.0)) throw contract_error("cosine schedule: lr0 must be > 0");
    if (lr_final < 0.0 || lr_final > lr0) {
        throw contract_error("cosine schedule: lr_final must be in [0, lr0]");
    }
    if (total_rounds < 1) throw contract_error("cosine schedule: total_rounds must be >= 1");
    return {ScheduleKind::Cosine, lr0, lr_final, total_rounds};
}

LrSchedule LrSchedule::harmonic(double lr0) {
    if (!(lr0 > 0.0)) throw contract_error("harmonic schedule: lr0 must be > 0");
    return {ScheduleKind::Harmonic, lr0, 0.0, 1};
}

LrSchedule LrSchedule::constant(double lr0) {
    if (!(lr0 > 0.0)) throw contract_error("constant schedule: lr0 must be > 0");
    return {ScheduleKind::Constant, lr0, 0.0, 1};
}

double lr_at(const LrSchedule& schedule, int t) {
    if (t < 0) throw contract_error("lr_at: round index must be >= 0");
    switch (schedule.kind) {
        case ScheduleKind::Cosine: {
            const int T = schedule.total_rounds;
            if (t >= T) {
                throw contract_error("lr_at: round " + std::to_string(t) +
                                     " outside cosine horizon T=" + std::to_string(T));
            }
            if (T == 1) return schedule.lr0;
            const double phase = std::numbers::pi * static_cast<double>(t) / (T - 1);
            return schedule.lr_final + 0.5 * (schedule.lr0 - schedule.lr_final) * (1.0 + std::cos(phase));
        }
        case ScheduleKind::Harmonic:
            return schedule.lr0 / (1.0 + static_cast<double>(t));
        case ScheduleKind::Constant:
            return schedule.lr0;
    }
    throw contract_error("lr_at: unknown schedule kind");
}

ScheduleAudit audit_schedule(const LrSchedule& schedule) {
    ScheduleAudit audit;
    switch (schedule.kind) {
        case ScheduleKind::Harmonic:
            // lr0/(1+t): limit 0, harmonic sum diverges, p=2 sum converges.
            audit.limit_is_zero = true;
            audit.sum_diverges = true;
            audit.sum_sq_converges = true;
            break;
        case ScheduleKind::Constant:
            audit.limit_is_zero = false;
            audit.sum_diverges = true;
            audit.sum_sq_converges = false;
            break;
        case ScheduleKind::Cosine:
            // Finite horizon, treated as continuing at lr_final afterwards.
            audit.limit_is_zero = (schedule.lr_final == 0.0);
            audit.sum_diverges = (schedule.lr_final > 0.0);
            audit.sum_sq_converges = (schedule.lr_final == 0.0);
            break;
    }
    if (!audit.limit_is_zero) audit.failed.push_back("lim eta_t = 0");
    if (!audit.sum_diverges) audit.failed.push_back("sum eta_t = inf");
    if (!audit.sum_sq_converges) audit.failed.push_back("sum eta_t^2 < inf");
    audit.passes = audit.failed.empty();
    return audit;
}

std::string schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Cosine: return "cosine";
        case ScheduleKind::Harmonic: return "harmonic";
        case ScheduleKind::Constant: return "constant";
    }
    return "unknown";
}

}  // namespace fedsim
