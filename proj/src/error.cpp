#include "idsolve/error.hpp"

namespace idsolve {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::duplicate_id: return "DUPLICATE_ID";
        case ErrorCode::bad_outcomes: return "BAD_OUTCOMES";
        case ErrorCode::cycle: return "CYCLE";
        case ErrorCode::cpt_missing: return "CPT_MISSING";
        case ErrorCode::cpt_scope_mismatch: return "CPT_SCOPE_MISMATCH";
        case ErrorCode::cpt_not_normalized: return "CPT_NOT_NORMALIZED";
        case ErrorCode::negative_probability: return "NEGATIVE_PROBABILITY";
        case ErrorCode::value_table_missing: return "VALUE_TABLE_MISSING";
        case ErrorCode::value_scope_mismatch: return "VALUE_SCOPE_MISMATCH";
        case ErrorCode::value_has_children: return "VALUE_HAS_CHILDREN";
        case ErrorCode::missing_value_node: return "MISSING_VALUE_NODE";
        case ErrorCode::multiple_values_without_combination: return "MULTIPLE_VALUES_WITHOUT_COMBINATION";
        case ErrorCode::decision_order_invalid: return "DECISION_ORDER_INVALID";
        case ErrorCode::decision_order_inconsistent: return "DECISION_ORDER_INCONSISTENT";
        case ErrorCode::no_forgetting_violated: return "NO_FORGETTING_VIOLATED";
        case ErrorCode::evidence_not_chance: return "EVIDENCE_NOT_CHANCE";
        case ErrorCode::evidence_out_of_range: return "EVIDENCE_OUT_OF_RANGE";
        case ErrorCode::evidence_after_decision: return "EVIDENCE_AFTER_DECISION";
        case ErrorCode::barren_node: return "BARREN_NODE";
        case ErrorCode::unknown_variable: return "UNKNOWN_VARIABLE";
        case ErrorCode::not_a_decision: return "NOT_A_DECISION";
        case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
        case ErrorCode::cardinality_mismatch: return "CARDINALITY_MISMATCH";
        case ErrorCode::var_not_in_scope: return "VAR_NOT_IN_SCOPE";
        case ErrorCode::index_out_of_range: return "INDEX_OUT_OF_RANGE";
        case ErrorCode::degenerate_value: return "DEGENERATE_VALUE";
        case ErrorCode::negative_factor: return "NEGATIVE_FACTOR";
        case ErrorCode::negative_entry: return "NEGATIVE_ENTRY";
        case ErrorCode::negative_weight: return "NEGATIVE_WEIGHT";
        case ErrorCode::uncovered_table: return "UNCOVERED_TABLE";
        case ErrorCode::zero_evidence_probability: return "ZERO_EVIDENCE_PROBABILITY";
        case ErrorCode::one_directional_check_failed: return "ONE_DIRECTIONAL_CHECK_FAILED";
        case ErrorCode::policy_space_too_large: return "POLICY_SPACE_TOO_LARGE";
        case ErrorCode::validation_failed: return "VALIDATION_FAILED";
        case ErrorCode::parse_error: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

}  // namespace idsolve
