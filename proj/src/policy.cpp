#include "idsolve/policy.hpp"

#include <algorithm>

namespace idsolve {

std::size_t DecisionRule::choose(const std::vector<std::size_t>& config) const {
    if (config.size() != scope_cards.size()) {
        throw Error(ErrorCode::invalid_argument, "configuration does not match the scope of " + decision);
    }
    std::size_t flat = 0;
    for (std::size_t k = 0; k < config.size(); ++k) {
        if (config[k] >= scope_cards[k]) {
            throw Error(ErrorCode::index_out_of_range, "configuration outside the scope of " + decision);
        }
        flat = flat * scope_cards[k] + config[k];
    }
    return choice.at(flat);
}

const DecisionRule* Policy::find(const std::string& decision) const {
    for (const auto& r : rules) {
        if (r.decision == decision) return &r;
    }
    return nullptr;
}

namespace {

ExtractedRule argmax_rows(const Factor& joint, VarId decision, const Factor* weight) {
    std::vector<VarId> rest;
    for (VarId v : joint.scope()) {
        if (v != decision) rest.push_back(v);
    }
    std::vector<VarId> order = rest;
    order.push_back(decision);
    const Factor table = align(joint, order);
    const std::size_t n = joint.cardinality(decision);
    ExtractedRule out;
    const std::size_t rows = table.size() / n;
    std::optional<Factor> w;
    if (weight != nullptr) w = align(*weight, rest);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t best = 0;
        bool all_zero = true;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = table[r * n + k];
            if (x != 0.0) all_zero = false;
            if (x > table[r * n + best]) best = k;
        }
        const bool zero_row = w ? !((*w)[r] > 0.0) : all_zero;
        if (zero_row) {
            best = 0;
            out.zero_rows.push_back(r);
        }
        out.choice.push_back(best);
    }
    return out;
}

}  // namespace

ExtractedRule extract_policy(const Factor& joint, VarId decision) {
    if (!joint.contains(decision)) {
        throw Error(ErrorCode::var_not_in_scope, "decision is not in the joint table");
    }
    if (joint.size() > 0 && joint.min() < 0.0) {
        throw Error(ErrorCode::negative_entry, "policy table has a negative entry");
    }
    return argmax_rows(joint, decision, nullptr);
}

ExtractedRule extract_policy(const Factor& joint, VarId decision, const Factor& weight) {
    if (!joint.contains(decision)) {
        throw Error(ErrorCode::var_not_in_scope, "decision is not in the joint table");
    }
    return argmax_rows(joint, decision, &weight);
}

Factor rule_indicator(const DecisionRule& rule, const InfluenceDiagram& diagram) {
    std::vector<VarId> scope;
    std::vector<std::size_t> cards;
    for (const auto& id : rule.scope) {
        const VarId v = diagram.index_of(id);
        scope.push_back(v);
        cards.push_back(diagram.variable(v).cardinality());
    }
    const VarId d = diagram.index_of(rule.decision);
    const std::size_t n = diagram.variable(d).cardinality();
    scope.push_back(d);
    cards.push_back(n);
    std::vector<double> values(rule.choice.size() * n, 0.0);
    for (std::size_t r = 0; r < rule.choice.size(); ++r) values[r * n + rule.choice[r]] = 1.0;
    return Factor(scope, cards, values);
}

DecisionRule make_rule(const std::vector<Variable>& vars, VarId decision, const std::vector<VarId>& scope,
                       ExtractedRule extracted) {
    DecisionRule rule;
    rule.decision = vars.at(decision).id;
    for (VarId v : scope) {
        rule.scope.push_back(vars.at(v).id);
        rule.scope_cards.push_back(vars.at(v).cardinality());
    }
    rule.choice = std::move(extracted.choice);
    rule.zero_probability_rows = std::move(extracted.zero_rows);
    return rule;
}

DecisionRule trivial_rule(const Variable& decision) {
    DecisionRule rule;
    rule.decision = decision.id;
    rule.choice = {0};
    return rule;
}

}  // namespace idsolve
