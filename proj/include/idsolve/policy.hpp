#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idsolve/factor.hpp"
#include "idsolve/model.hpp"

namespace idsolve {

/// Deterministic decision function: one alternative per configuration of the
/// scope, enumerated row-major (last scope variable fastest).
struct DecisionRule {
    std::string decision;
    std::vector<std::string> scope;
    std::vector<std::size_t> scope_cards;
    std::vector<std::size_t> choice;
    /// Configurations whose information state had probability zero; their
    /// choice is alternative 0.
    std::vector<std::size_t> zero_probability_rows;

    /// Alternative chosen at `config` (outcome index per scope variable).
    [[nodiscard]] std::size_t choose(const std::vector<std::size_t>& config) const;
};

struct Policy {
    /// In decision order.
    std::vector<DecisionRule> rules;

    [[nodiscard]] const DecisionRule* find(const std::string& decision) const;
};

struct Diagnostics {
    std::string backend;
    std::size_t messages = 0;
    std::size_t edges = 0;
    std::vector<std::size_t> cluster_sizes;
    /// Value table was constant; every policy is optimal.
    bool degenerate = false;
    std::vector<std::string> notes;
    /// Root sums of the Value slices in the single-pass backend.
    std::optional<double> root_v0;
    std::optional<double> root_v1;
};

struct EvaluationResult {
    Policy policy;
    /// P{U=1 | E=e, policy} when the rescaled utility encoding was used.
    std::optional<double> meu;
    double mev = 0.0;
    double evidence_probability = 1.0;
    Diagnostics diagnostics;
};

struct ExtractedRule {
    /// Row-major over the factor scope without the decision.
    std::vector<std::size_t> choice;
    std::vector<std::size_t> zero_rows;
};

/// argmax over `decision` of a nonnegative table, per configuration of the
/// remaining scope (in factor order). Ties and all-zero rows go to
/// alternative 0; all-zero rows are reported. Throws NEGATIVE_ENTRY.
ExtractedRule extract_policy(const Factor& joint, VarId decision);

/// Same as extract_policy but accepts negative entries; `weight` (same scope
/// without the decision) marks rows with zero probability.
ExtractedRule extract_policy(const Factor& joint, VarId decision, const Factor& weight);

/// 0/1 factor over (scope..., decision) encoding a rule.
Factor rule_indicator(const DecisionRule& rule, const InfluenceDiagram& diagram);

/// Rule over network variable indices turned into ids of `diagram`.
DecisionRule make_rule(const std::vector<Variable>& vars, VarId decision, const std::vector<VarId>& scope,
                       ExtractedRule extracted);

/// Rule with empty scope choosing alternative 0, for decisions that cannot
/// influence the value.
DecisionRule trivial_rule(const Variable& decision);

}  // namespace idsolve
