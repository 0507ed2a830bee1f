#pragma once

#include <vector>

#include <json.hpp>

#include "fedsim/partition.hpp"

namespace fedsim {

// |E| = sum_m (|D_m| / |D|)^2 and whether it meets the <= 1/2 bound the
// convergence guarantee requires.
struct ConvergenceAudit {
    double value = 0.0;
    bool passes = false;
};

ConvergenceAudit audit_convergence_condition(const EdgeGrouping& grouping,
                                             const Partition& partition);

// Per-round inputs of the descent inequality
//   ||w_next - y||^2 <= 2 * sum_m q_m * (||w_cur - y||^2 + lr^2 |I_m|^2 c^2)
//                       - 4 a lr (L(w_cur) - L(y))
// with q_m = (|D_m| / |D|)^2 and a = min_m |D_m| / |D|. Split as
// rhs = const_term + c^2 * c_coeff so a later re-audit with a larger c only
// needs the two coefficients.
struct LemmaTerms {
    double lhs = 0.0;         // ||w_next - y||^2
    double dist_sq = 0.0;     // ||w_cur - y||^2
    double weight_sq_sum = 0.0;  // sum_m q_m
    double ring_term = 0.0;   // sum_m q_m * |I_m|^2
    double lr = 0.0;
    double a = 0.0;
    double loss_cur = 0.0;    // training-set loss at w_cur
    double loss_ref = 0.0;    // training-set loss at y
};

struct LemmaVerdict {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    // Smallest c that would make the inequality hold; equals c_est when it
    // already does, +inf when no c can fix it (lr or ring term zero).
    double c_required = 0.0;
};

LemmaVerdict audit_lemma(const LemmaTerms& terms, double c_est);

// Collected over a run; re_audit re-evaluates every stored round with one
// final c and reports the fraction that holds.
struct LemmaAuditLog {
    struct Entry {
        int round = 0;
        LemmaTerms terms;
        LemmaVerdict verdict;   // with the c_est current at that round
        double c_est = 0.0;
    };
    std::vector<Entry> entries;
    double final_c = 0.0;

    void record(int round, const LemmaTerms& terms, double c_est);
    double re_audit_hold_fraction() const;  // with final_c
    nlohmann::json to_json() const;
};

}  // namespace fedsim
