#include "fedsim/audit.hpp"

#include <cmath>
#include <limits>

#include "fedsim/errors.hpp"

namespace fedsim {

ConvergenceAudit audit_convergence_condition(const EdgeGrouping& grouping,
                                             const Partition& partition) {
    ConvergenceAudit audit;
    audit.value = edge_statistic(grouping, partition);
    audit.passes = audit.value <= 0.5;
    return audit;
}

LemmaVerdict audit_lemma(const LemmaTerms& terms, double c_est) {
    LemmaVerdict verdict;
    const double const_term = 2.0 * terms.weight_sq_sum * terms.dist_sq -
                              4.0 * terms.a * terms.lr * (terms.loss_cur - terms.loss_ref);
    const double c_coeff = 2.0 * terms.lr * terms.lr * terms.ring_term;
    verdict.lhs = terms.lhs;
    verdict.rhs = const_term + c_coeff * c_est * c_est;
    verdict.holds = verdict.lhs <= verdict.rhs;
    if (verdict.holds) {
        verdict.c_required = c_est;
    } else if (c_coeff > 0.0) {
        // Nudged up so the round re-audits as holding despite the sqrt rounding.
        verdict.c_required = std::sqrt((verdict.lhs - const_term) / c_coeff) * (1.0 + 1e-12);
    } else {
        verdict.c_required = std::numeric_limits<double>::infinity();
    }
    return verdict;
}

void LemmaAuditLog::record(int round, const LemmaTerms& terms, double c_est) {
    Entry entry;
    entry.round = round;
    entry.terms = terms;
    entry.verdict = audit_lemma(terms, c_est);
    entry.c_est = c_est;
    entries.push_back(entry);
}

double LemmaAuditLog::re_audit_hold_fraction() const {
    if (entries.empty()) return 1.0;
    std::size_t holds = 0;
    for (const auto& entry : entries) {
        if (audit_lemma(entry.terms, final_c).holds) ++holds;
    }
    return static_cast<double>(holds) / static_cast<double>(entries.size());
}

nlohmann::json LemmaAuditLog::to_json() const {
    nlohmann::json j;
    auto& rounds = j["rounds"] = nlohmann::json::array();
    for (const auto& entry : entries) {
        rounds.push_back({
            {"round", entry.round},
            {"lhs", entry.verdict.lhs},
            {"rhs", entry.verdict.rhs},
            {"holds", entry.verdict.holds},
            {"c_est", entry.c_est},
        });
    }
    j["final_c"] = final_c;
    j["hold_fraction_final_c"] = re_audit_hold_fraction();
    return j;
}

}  // namespace fedsim
