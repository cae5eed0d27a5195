#include "idsolve/queries.hpp"

#include "backend_util.hpp"

namespace idsolve {

EvaluationResult solve_by_queries(const InfluenceDiagram& diagram, const QueryOptions& options) {
    Network net;
    try {
        net = to_belief_network(diagram, options.transform);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_value) throw;
        return detail::degenerate_result(diagram, options.transform, "queries");
    }
    const VarId u = *net.value_var;
    const auto families = detail::decision_families(net);
    ClusterTree tree = build_cluster_tree(net, families);

    EvaluationResult out;
    out.diagnostics.backend = "queries";
    for (const auto& c : tree.clusters) out.diagnostics.cluster_sizes.push_back(c.size());
    out.diagnostics.edges = tree.edges.size();

    std::map<VarId, Factor> tables = net.tables;
    auto table_list = [&] {
        std::vector<Factor> list;
        for (const auto& [v, f] : tables) list.push_back(f);
        return list;
    };
    Assignment with_utility = net.evidence;
    with_utility[u] = 1;

    std::vector<DecisionRule> rules;
    for (std::size_t i = net.decisions.size(); i-- > 0;) {
        const auto list = table_list();
        initialize_potentials(tree, list, with_utility, options.evidence_mode);
        const std::size_t c = tree.smallest_covering(families[i]);
        const auto collected = collect(tree, c);
        out.diagnostics.messages += collected.messages;
        // P{d, r, U=1, E=e}: proportional to P{d, r | U=1, E=e}.
        const Factor joint = detail::project(collected.potential, families[i]);
        auto extracted = extract_policy(joint, net.decisions[i]);
        tables[net.decisions[i]] = detail::deterministic_table(net, i, extracted.choice);
        rules.push_back(make_rule(net.variables, net.decisions[i], net.decision_scopes[i], std::move(extracted)));
    }

    initialize_potentials(tree, table_list(), net.evidence, options.evidence_mode);
    const std::vector<VarId> query{u};
    const std::size_t c = tree.smallest_covering(query);
    const auto collected = collect(tree, c);
    out.diagnostics.messages += collected.messages;
    const Factor pu = detail::project(collected.potential, query);
    const double pe = pu.sum();
    if (!(pe > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
    out.meu = pu[1] / pe;
    out.mev = net.scale->unscale(*out.meu);
    out.evidence_probability = pe * net.evidence_factor;
    out.policy = detail::assemble_policy(diagram, rules);
    return out;
}

}  // namespace idsolve
