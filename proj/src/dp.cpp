#include "idsolve/dp.hpp"

namespace idsolve {

SeparableValueModel separable_structure(const InfluenceDiagram& diagram) {
    SeparableValueModel out;
    out.combination = diagram.combination();
    for (VarId v : diagram.value_nodes()) out.values.push_back(diagram.variable(v).id);
    for (const auto& rel : relevance_analysis(diagram)) {
        out.decisions.push_back(diagram.variable(rel.decision).id);
        std::vector<std::string> w;
        for (VarId v : rel.values) w.push_back(diagram.variable(v).id);
        out.dependent_values.push_back(std::move(w));
    }
    return out;
}

EvaluationResult solve_product_decomposition(const InfluenceDiagram& diagram, const TransformOptions& transform) {
    if (diagram.combination() != Combination::product && diagram.value_nodes().size() > 1) {
        throw Error(ErrorCode::invalid_argument, "product decomposition needs the product combination");
    }
    ClusterOptions opts;
    opts.mode = Encoding::likelihood;
    opts.transform = transform;
    EvaluationResult r = solve_by_clustering(diagram, opts);
    r.diagnostics.notes.push_back("local value factors: " + std::to_string(diagram.value_nodes().size()));
    return r;
}

EvaluationResult solve_additive_decomposition(const InfluenceDiagram& diagram, const SolveOptions& options) {
    if (diagram.combination() != Combination::sum && diagram.value_nodes().size() > 1) {
        throw Error(ErrorCode::invalid_argument, "additive decomposition needs the sum combination");
    }
    // The transform merges too, but takes relevance from the local values; a
    // pre-merged diagram would make every earlier attribute look relevant.
    EvaluationResult r = solve(diagram, options);
    const InfluenceDiagram merged = merge_values(diagram);
    const VarId v = merged.value_nodes().front();
    const Factor& t = *merged.value_table(v);
    std::string scope;
    for (VarId a : t.scope()) scope += (scope.empty() ? "" : ", ") + merged.variable(a).id;
    r.diagnostics.notes.push_back("merged value " + merged.variable(v).id + " over {" + scope + "}, " +
                                  std::to_string(t.size()) + " entries");
    return r;
}

}  // namespace idsolve
