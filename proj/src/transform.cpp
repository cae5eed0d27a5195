#include "idsolve/transform.hpp"

#include <algorithm>

namespace idsolve {

std::string_view to_string(Encoding e) {
    switch (e) {
        case Encoding::rescaled_utility: return "rescaled";
        case Encoding::valuation: return "valuation";
        case Encoding::likelihood: return "likelihood";
    }
    return "valuation";
}

std::vector<std::size_t> Network::cardinalities() const {
    std::vector<std::size_t> out;
    out.reserve(variables.size());
    for (const auto& v : variables) out.push_back(v.cardinality());
    return out;
}

bool Network::is_decision(VarId v) const {
    return std::find(decisions.begin(), decisions.end(), v) != decisions.end();
}

std::size_t Network::decision_index(VarId d) const {
    auto it = std::find(decisions.begin(), decisions.end(), d);
    if (it == decisions.end()) {
        throw Error(ErrorCode::not_a_decision, "not a decision of the network: " + std::to_string(d));
    }
    return static_cast<std::size_t>(it - decisions.begin());
}

std::vector<Factor> Network::chance_tables() const {
    std::vector<Factor> out;
    for (const auto& [v, f] : tables) {
        if (!is_decision(v)) out.push_back(f);
    }
    out.insert(out.end(), value_factors.begin(), value_factors.end());
    return out;
}

namespace {

/// Entry of `local` at the configuration `digits` of the scope `scope`.
double lookup(const Factor& local, const std::vector<VarId>& scope, const std::vector<std::size_t>& digits) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < local.scope().size(); ++k) {
        const auto pos = static_cast<std::size_t>(
            std::find(scope.begin(), scope.end(), local.scope()[k]) - scope.begin());
        flat = flat * local.cardinalities()[k] + digits[pos];
    }
    return local[flat];
}

void check_nonnegative_product(const InfluenceDiagram& d) {
    if (d.combination() != Combination::product) return;
    for (VarId v : d.value_nodes()) {
        const Factor* f = d.value_table(v);
        if (f != nullptr && f->min() < 0.0) {
            throw Error(ErrorCode::negative_factor,
                        "product-combined value " + d.variable(v).id + " has a negative entry");
        }
    }
}

/// Broadcast sum or product of the local value tables over their joint scope.
Factor combined_table(const InfluenceDiagram& d) {
    const auto values = d.value_nodes();
    std::set<VarId> attrs;
    for (VarId v : values) {
        for (VarId a : d.value_table(v)->scope()) attrs.insert(a);
    }
    std::vector<VarId> scope(attrs.begin(), attrs.end());
    std::vector<std::size_t> cards;
    for (VarId a : scope) cards.push_back(d.variable(a).cardinality());
    const bool prod = d.combination() == Combination::product;
    std::vector<double> table;
    for (ConfigCounter c(cards); !c.done(); c.next()) {
        double acc = prod ? 1.0 : 0.0;
        for (VarId v : values) {
            const double x = lookup(*d.value_table(v), scope, c.digits());
            acc = prod ? acc * x : acc + x;
        }
        table.push_back(acc);
    }
    return Factor(scope, cards, table, Semantics::valuation);
}

}  // namespace

InfluenceDiagram merge_values(const InfluenceDiagram& diagram) {
    check_nonnegative_product(diagram);
    const auto values = diagram.value_nodes();
    if (values.size() <= 1) return diagram;

    const Factor total = combined_table(diagram);
    InfluenceDiagram out;
    std::map<VarId, VarId> remap;
    std::string merged_id;
    for (VarId v : values) merged_id += (merged_id.empty() ? "" : "+") + diagram.variable(v).id;
    for (VarId v = 0; v < diagram.size(); ++v) {
        const Variable& var = diagram.variable(v);
        if (var.kind == VarKind::chance) remap[v] = out.add_chance(var.id, var.outcomes, var.name);
        if (var.kind == VarKind::decision) remap[v] = out.add_decision(var.id, var.outcomes, var.name);
    }
    const VarId merged = out.add_value(merged_id);
    for (const auto& [p, c] : diagram.arcs()) {
        if (remap.contains(p) && remap.contains(c)) out.add_arc(remap[p], remap[c]);
    }
    std::vector<VarId> attrs;
    for (VarId a : total.scope()) {
        attrs.push_back(remap.at(a));
        out.add_arc(remap.at(a), merged);
    }
    for (const auto& [v, f] : diagram.cpts()) {
        if (!remap.contains(v)) continue;
        std::vector<VarId> parents;
        for (std::size_t k = 0; k + 1 < f.scope().size(); ++k) parents.push_back(remap.at(f.scope()[k]));
        out.set_cpt(remap[v], parents, f.values());
    }
    out.set_value_table(merged, attrs, total.values());
    std::vector<VarId> order;
    for (VarId d : diagram.decision_order()) order.push_back(remap.at(d));
    out.set_decision_order(order);
    for (const auto& [v, o] : diagram.evidence()) out.set_evidence(remap.at(v), o);
    return out;
}

namespace {

Network convert(const InfluenceDiagram& diagram, TransformOptions options, Encoding encoding) {
    require_valid(diagram);
    check_nonnegative_product(diagram);
    const bool keep_factors = encoding == Encoding::likelihood && diagram.combination() == Combination::product;
    InfluenceDiagram merged = keep_factors ? diagram : merge_values(diagram);

    Network net;
    net.encoding = encoding;
    InfluenceDiagram d = merged;
    if (options.prune) {
        const auto values = merged.value_nodes();
        auto pr = prune(merged, std::set<VarId>(values.begin(), values.end()));
        d = std::move(pr.diagram);
        net.removed = std::move(pr.removed);
        net.evidence_factor = pr.evidence_factor;
    }
    net.variables = d.variables();
    net.evidence = d.evidence();
    net.decisions = d.decision_order();

    for (VarId dec : net.decisions) net.information_sets.push_back(information_set(d, dec));
    if (options.full_information) {
        for (VarId dec : net.decisions) net.decision_scopes.push_back(information_set(d, dec));
    } else {
        // Relevance on the unmerged diagram: local value nodes keep W^i small
        // (a merged sum would make every earlier attribute look relevant).
        std::map<std::string, std::vector<std::string>> relevant;
        for (const auto& rel : relevance_analysis(diagram)) {
            auto& ids = relevant[diagram.variable(rel.decision).id];
            for (VarId r : rel.relevant) ids.push_back(diagram.variable(r).id);
        }
        for (VarId dec : net.decisions) {
            std::vector<VarId> scope;
            for (const auto& id : relevant.at(d.variable(dec).id)) {
                if (auto v = d.find(id)) scope.push_back(*v);
            }
            std::sort(scope.begin(), scope.end());
            net.decision_scopes.push_back(std::move(scope));
        }
    }

    for (const auto& [v, f] : d.cpts()) net.tables.emplace(v, f);
    for (std::size_t i = 0; i < net.decisions.size(); ++i) {
        const VarId dec = net.decisions[i];
        std::vector<VarId> scope = net.decision_scopes[i];
        scope.push_back(dec);
        std::vector<std::size_t> cards;
        for (VarId v : scope) cards.push_back(d.variable(v).cardinality());
        const double n = static_cast<double>(d.variable(dec).cardinality());
        net.tables.emplace(dec, Factor::filled(scope, cards, 1.0 / n));
    }

    const auto values = d.value_nodes();
    if (keep_factors) {
        for (VarId v : values) {
            Factor f = *d.value_table(v);
            f.set_semantics(Semantics::likelihood);
            net.value_factors.push_back(std::move(f));
        }
        const Factor total = combined_table(d);
        net.range = ValueScale{total.min(), total.max()};
        for (VarId a : total.scope()) net.value_attributes.push_back(a);
        return net;
    }

    const VarId value = values.front();
    const Factor& table = *d.value_table(value);
    net.value_attributes = table.scope();
    net.range = ValueScale{table.min(), table.max()};
    if (encoding == Encoding::likelihood) {
        Factor f = table;
        f.set_semantics(Semantics::likelihood);
        net.value_factors.push_back(std::move(f));
        return net;
    }
    if (encoding == Encoding::rescaled_utility) {
        if (!(net.range.v_max > net.range.v_min)) {
            throw Error(ErrorCode::degenerate_value, "value table is constant; every policy is optimal");
        }
        net.scale = net.range;
    }

    net.variables[value].outcomes = {"0", "1"};
    net.variables[value].name = encoding == Encoding::rescaled_utility ? "Utility" : "Value";
    net.value_var = value;
    std::vector<VarId> scope = table.scope();
    scope.push_back(value);
    std::vector<std::size_t> cards = table.cardinalities();
    cards.push_back(2);
    std::vector<double> rows;
    rows.reserve(table.size() * 2);
    for (double v : table.values()) {
        if (encoding == Encoding::rescaled_utility) {
            const double u = net.scale->rescale(v);
            rows.push_back(1.0 - u);
            rows.push_back(u);
        } else {
            rows.push_back(1.0);
            rows.push_back(v);
        }
    }
    net.tables.emplace(value, Factor(scope, cards, rows,
                                     encoding == Encoding::valuation ? Semantics::valuation : Semantics::probability));
    return net;
}

}  // namespace

Network to_belief_network(const InfluenceDiagram& diagram, TransformOptions options) {
    return convert(diagram, options, Encoding::rescaled_utility);
}

Network to_valuation_network(const InfluenceDiagram& diagram, TransformOptions options) {
    return convert(diagram, options, Encoding::valuation);
}

Network to_likelihood_network(const InfluenceDiagram& diagram, TransformOptions options) {
    return convert(diagram, options, Encoding::likelihood);
}

}  // namespace idsolve
