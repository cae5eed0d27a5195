#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idsolve {

enum class ErrorCode {
    // structural validation
    duplicate_id,
    bad_outcomes,
    cycle,
    cpt_missing,
    cpt_scope_mismatch,
    cpt_not_normalized,
    negative_probability,
    value_table_missing,
    value_scope_mismatch,
    value_has_children,
    missing_value_node,
    multiple_values_without_combination,
    decision_order_invalid,
    decision_order_inconsistent,
    no_forgetting_violated,
    evidence_not_chance,
    evidence_out_of_range,
    evidence_after_decision,
    barren_node,
    // algebra and solvers
    unknown_variable,
    not_a_decision,
    invalid_argument,
    cardinality_mismatch,
    var_not_in_scope,
    index_out_of_range,
    degenerate_value,
    negative_factor,
    negative_entry,
    negative_weight,
    uncovered_table,
    zero_evidence_probability,
    one_directional_check_failed,
    policy_space_too_large,
    validation_failed,
    parse_error,
};

/// Upper-case code name as printed by the CLI, e.g. "CPT_NOT_NORMALIZED".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace idsolve
