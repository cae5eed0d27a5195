#include "backend_util.hpp"

#include <algorithm>

namespace idsolve::detail {

std::vector<std::vector<VarId>> decision_families(const Network& net) {
    std::vector<std::vector<VarId>> out;
    for (std::size_t i = 0; i < net.decisions.size(); ++i) {
        auto fam = net.decision_scopes[i];
        fam.push_back(net.decisions[i]);
        out.push_back(std::move(fam));
    }
    return out;
}

Factor deterministic_table(const Network& net, std::size_t i, const std::vector<std::size_t>& choice) {
    std::vector<VarId> scope = net.decision_scopes[i];
    std::vector<std::size_t> cards;
    for (VarId v : scope) cards.push_back(net.variables[v].cardinality());
    const VarId d = net.decisions[i];
    const std::size_t n = net.variables[d].cardinality();
    scope.push_back(d);
    cards.push_back(n);
    std::vector<double> values(choice.size() * n, 0.0);
    for (std::size_t r = 0; r < choice.size(); ++r) values[r * n + choice[r]] = 1.0;
    return Factor(scope, cards, values);
}

Policy assemble_policy(const InfluenceDiagram& original, const std::vector<DecisionRule>& solved) {
    Policy out;
    for (VarId d : original.decision_order()) {
        const auto& id = original.variable(d).id;
        auto it = std::find_if(solved.begin(), solved.end(), [&](const DecisionRule& r) { return r.decision == id; });
        out.rules.push_back(it != solved.end() ? *it : trivial_rule(original.variable(d)));
    }
    return out;
}

EvaluationResult degenerate_result(const InfluenceDiagram& diagram, const TransformOptions& options,
                                   const std::string& backend) {
    const Network net = to_valuation_network(diagram, options);
    std::vector<DecisionRule> rules;
    for (std::size_t i = 0; i < net.decisions.size(); ++i) {
        std::size_t rows = 1;
        for (VarId v : net.decision_scopes[i]) rows *= net.variables[v].cardinality();
        ExtractedRule ex;
        ex.choice.assign(rows, 0);
        rules.push_back(make_rule(net.variables, net.decisions[i], net.decision_scopes[i], std::move(ex)));
    }
    EvaluationResult out;
    out.policy = assemble_policy(diagram, rules);
    out.mev = net.range.v_min;
    out.evidence_probability = evidence_probability(net);
    if (!(out.evidence_probability > 0.0)) {
        throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
    }
    out.diagnostics.backend = backend;
    out.diagnostics.degenerate = true;
    out.diagnostics.notes.push_back("constant value table: every policy is optimal");
    return out;
}

Factor project(const Factor& f, const std::vector<VarId>& keep) {
    std::vector<VarId> drop;
    for (VarId v : f.scope()) {
        if (std::find(keep.begin(), keep.end(), v) == keep.end()) drop.push_back(v);
    }
    return align(marginalize_sum(f, drop), keep);
}

}  // namespace idsolve::detail
