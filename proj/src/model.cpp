#include "idsolve/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <sstream>

namespace idsolve {

namespace {

constexpr double kCptTolerance = 1e-9;

std::string join_ids(const InfluenceDiagram& d, const std::vector<VarId>& vs) {
    std::string out;
    for (VarId v : vs) {
        if (!out.empty()) out += ", ";
        out += d.variable(v).id;
    }
    return out;
}

}  // namespace

std::string_view to_string(VarKind kind) {
    switch (kind) {
        case VarKind::chance: return "chance";
        case VarKind::decision: return "decision";
        case VarKind::value: return "value";
    }
    return "chance";
}

std::string_view to_string(Combination c) {
    switch (c) {
        case Combination::none: return "none";
        case Combination::sum: return "sum";
        case Combination::product: return "product";
    }
    return "none";
}

// ---------------------------------------------------------------------------
// InfluenceDiagram

VarId InfluenceDiagram::add_variable(Variable v) {
    if (v.id.empty()) {
        throw Error(ErrorCode::invalid_argument, "variable id must be non-empty");
    }
    if (index_.contains(v.id)) {
        throw Error(ErrorCode::duplicate_id, "duplicate variable id: " + v.id);
    }
    if (v.name.empty()) v.name = v.id;
    const VarId id = variables_.size();
    index_.emplace(v.id, id);
    variables_.push_back(std::move(v));
    return id;
}

VarId InfluenceDiagram::add_chance(std::string id, std::vector<std::string> outcomes, std::string name) {
    return add_variable(Variable{std::move(id), std::move(name), VarKind::chance, std::move(outcomes)});
}

VarId InfluenceDiagram::add_decision(std::string id, std::vector<std::string> alternatives, std::string name) {
    return add_variable(Variable{std::move(id), std::move(name), VarKind::decision, std::move(alternatives)});
}

VarId InfluenceDiagram::add_value(std::string id, std::string name) {
    return add_variable(Variable{std::move(id), std::move(name), VarKind::value, {}});
}

void InfluenceDiagram::check(VarId v) const {
    if (v >= variables_.size()) {
        throw Error(ErrorCode::unknown_variable, "no variable with index " + std::to_string(v));
    }
}

void InfluenceDiagram::add_arc(VarId parent, VarId child) {
    check(parent);
    check(child);
    if (parent == child) {
        throw Error(ErrorCode::cycle, "self loop on " + variables_[parent].id);
    }
    if (std::find(arcs_.begin(), arcs_.end(), std::make_pair(parent, child)) == arcs_.end()) {
        arcs_.emplace_back(parent, child);
    }
}

void InfluenceDiagram::add_arc(const std::string& parent, const std::string& child) {
    add_arc(index_of(parent), index_of(child));
}

void InfluenceDiagram::set_cpt(VarId var, const std::vector<VarId>& parent_order, std::vector<double> probabilities) {
    check(var);
    std::vector<VarId> scope = parent_order;
    scope.push_back(var);
    std::vector<std::size_t> cards;
    for (VarId v : scope) {
        check(v);
        cards.push_back(variables_[v].cardinality());
    }
    cpts_.insert_or_assign(var, Factor(std::move(scope), std::move(cards), std::move(probabilities)));
}

void InfluenceDiagram::set_value_table(VarId var, const std::vector<VarId>& attributes, std::vector<double> values) {
    check(var);
    std::vector<std::size_t> cards;
    for (VarId v : attributes) {
        check(v);
        cards.push_back(variables_[v].cardinality());
    }
    value_tables_.insert_or_assign(var, Factor(attributes, std::move(cards), std::move(values), Semantics::valuation));
}

void InfluenceDiagram::set_evidence(VarId var, std::size_t outcome) {
    check(var);
    evidence_[var] = outcome;
}

const Variable& InfluenceDiagram::variable(VarId v) const {
    check(v);
    return variables_[v];
}

std::optional<VarId> InfluenceDiagram::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

VarId InfluenceDiagram::index_of(const std::string& id) const {
    auto v = find(id);
    if (!v) throw Error(ErrorCode::unknown_variable, "unknown variable: " + id);
    return *v;
}

std::vector<VarId> InfluenceDiagram::parents(VarId v) const {
    std::vector<VarId> out;
    for (const auto& [p, c] : arcs_) {
        if (c == v) out.push_back(p);
    }
    return out;
}

std::vector<VarId> InfluenceDiagram::children(VarId v) const {
    std::vector<VarId> out;
    for (const auto& [p, c] : arcs_) {
        if (p == v) out.push_back(c);
    }
    return out;
}

const Factor* InfluenceDiagram::cpt(VarId v) const {
    auto it = cpts_.find(v);
    return it == cpts_.end() ? nullptr : &it->second;
}

const Factor* InfluenceDiagram::value_table(VarId v) const {
    auto it = value_tables_.find(v);
    return it == value_tables_.end() ? nullptr : &it->second;
}

std::vector<VarId> InfluenceDiagram::nodes_of_kind(VarKind kind) const {
    std::vector<VarId> out;
    for (VarId v = 0; v < variables_.size(); ++v) {
        if (variables_[v].kind == kind) out.push_back(v);
    }
    return out;
}

InfluenceDiagram InfluenceDiagram::subset(const std::set<VarId>& keep) const {
    InfluenceDiagram out;
    std::map<VarId, VarId> remap;
    for (VarId v = 0; v < variables_.size(); ++v) {
        if (keep.contains(v)) remap[v] = out.add_variable(variables_[v]);
    }
    auto mapped = [&](const std::vector<VarId>& vs, std::vector<VarId>& into) {
        into.clear();
        for (VarId v : vs) {
            auto it = remap.find(v);
            if (it == remap.end()) return false;
            into.push_back(it->second);
        }
        return true;
    };
    for (const auto& [p, c] : arcs_) {
        if (remap.contains(p) && remap.contains(c)) out.arcs_.emplace_back(remap[p], remap[c]);
    }
    std::vector<VarId> scope;
    for (const auto& [v, f] : cpts_) {
        if (remap.contains(v) && mapped(f.scope(), scope)) {
            out.cpts_.emplace(remap[v], Factor(scope, f.cardinalities(), f.values(), f.semantics()));
        }
    }
    for (const auto& [v, f] : value_tables_) {
        if (remap.contains(v) && mapped(f.scope(), scope)) {
            out.value_tables_.emplace(remap[v], Factor(scope, f.cardinalities(), f.values(), f.semantics()));
        }
    }
    out.combination_ = combination_;
    for (VarId d : decision_order_) {
        if (remap.contains(d)) out.decision_order_.push_back(remap[d]);
    }
    for (const auto& [v, o] : evidence_) {
        if (remap.contains(v)) out.evidence_[remap[v]] = o;
    }
    return out;
}

bool ValidationReport::has(ErrorCode code) const {
    return std::any_of(errors.begin(), errors.end(), [&](const Issue& i) { return i.code == code; });
}

// ---------------------------------------------------------------------------
// Graph helpers

void Dag::add_arc(VarId from, VarId to) {
    if (std::find(children[from].begin(), children[from].end(), to) == children[from].end()) {
        children[from].push_back(to);
        parents[to].push_back(from);
    }
}

void Dag::remove_incoming(VarId v) {
    for (VarId p : parents[v]) {
        auto& ch = children[p];
        ch.erase(std::remove(ch.begin(), ch.end(), v), ch.end());
    }
    parents[v].clear();
}

Dag dag_of(const InfluenceDiagram& diagram) {
    Dag dag(diagram.size());
    for (const auto& [p, c] : diagram.arcs()) dag.add_arc(p, c);
    return dag;
}

std::optional<std::vector<VarId>> topological_order(const InfluenceDiagram& diagram) {
    const Dag dag = dag_of(diagram);
    std::vector<std::size_t> indegree(dag.size());
    for (VarId v = 0; v < dag.size(); ++v) indegree[v] = dag.parents[v].size();
    std::set<VarId> ready;
    for (VarId v = 0; v < dag.size(); ++v) {
        if (indegree[v] == 0) ready.insert(v);
    }
    std::vector<VarId> order;
    while (!ready.empty()) {
        const VarId v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (VarId c : dag.children[v]) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (order.size() != dag.size()) return std::nullopt;
    return order;
}

namespace {

std::set<VarId> ancestors_of(const Dag& dag, const std::set<VarId>& nodes) {
    std::set<VarId> seen(nodes.begin(), nodes.end());
    std::deque<VarId> queue(nodes.begin(), nodes.end());
    while (!queue.empty()) {
        const VarId v = queue.front();
        queue.pop_front();
        for (VarId p : dag.parents[v]) {
            if (seen.insert(p).second) queue.push_back(p);
        }
    }
    return seen;
}

std::set<VarId> descendants_of(const Dag& dag, VarId v) {
    std::set<VarId> seen;
    std::deque<VarId> queue{v};
    while (!queue.empty()) {
        const VarId u = queue.front();
        queue.pop_front();
        for (VarId c : dag.children[u]) {
            if (seen.insert(c).second) queue.push_back(c);
        }
    }
    return seen;
}

}  // namespace

std::set<VarId> d_connected(const Dag& dag, const std::set<VarId>& sources, const std::set<VarId>& given) {
    // Reachability over (node, direction) pairs: `up` means the trail arrived
    // from a child, `down` from a parent.
    const std::set<VarId> anc = ancestors_of(dag, given);
    enum Dir : int { up = 0, down = 1 };
    std::vector<std::array<bool, 2>> visited(dag.size(), {false, false});
    std::deque<std::pair<VarId, Dir>> queue;
    for (VarId s : sources) queue.emplace_back(s, up);
    std::set<VarId> reached;
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        const bool observed = given.contains(v);
        if (!observed) reached.insert(v);
        if (dir == up && !observed) {
            for (VarId p : dag.parents[v]) queue.emplace_back(p, up);
            for (VarId c : dag.children[v]) queue.emplace_back(c, down);
        } else if (dir == down) {
            if (!observed) {
                for (VarId c : dag.children[v]) queue.emplace_back(c, down);
            }
            if (anc.contains(v)) {
                for (VarId p : dag.parents[v]) queue.emplace_back(p, up);
            }
        }
    }
    return reached;
}

bool d_separated(const Dag& dag, const std::set<VarId>& x, const std::set<VarId>& y, const std::set<VarId>& given) {
    const auto reached = d_connected(dag, x, given);
    return std::none_of(y.begin(), y.end(), [&](VarId v) { return reached.contains(v); });
}

bool d_separated(const InfluenceDiagram& diagram, VarId x, VarId y, const std::set<VarId>& given) {
    (void)diagram.variable(x);
    (void)diagram.variable(y);
    for (VarId g : given) (void)diagram.variable(g);
    if (given.contains(x) || given.contains(y)) {
        throw Error(ErrorCode::invalid_argument, "query variables must not be in the conditioning set");
    }
    return d_separated(dag_of(diagram), {x}, {y}, given);
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate(const InfluenceDiagram& diagram) {
    ValidationReport report;
    auto error = [&](ErrorCode code, std::string msg, std::vector<VarId> vs) {
        std::vector<std::string> ids;
        for (VarId v : vs) ids.push_back(diagram.variable(v).id);
        report.errors.push_back(Issue{code, std::move(msg), std::move(ids)});
    };
    const auto& vars = diagram.variables();

    for (VarId v = 0; v < vars.size(); ++v) {
        const Variable& var = vars[v];
        if (var.kind == VarKind::value) continue;
        if (var.outcomes.empty()) {
            error(ErrorCode::bad_outcomes, var.id + " has no outcomes", {v});
            continue;
        }
        std::set<std::string> labels(var.outcomes.begin(), var.outcomes.end());
        if (labels.size() != var.outcomes.size()) {
            error(ErrorCode::bad_outcomes, var.id + " has repeated outcome labels", {v});
        }
    }

    const Dag dag = dag_of(diagram);
    const auto topo = topological_order(diagram);
    if (!topo) {
        std::vector<VarId> stuck;
        std::set<VarId> sorted;
        // Nodes left after peeling sources and sinks lie on or between cycles.
        std::vector<std::size_t> indeg(dag.size()), outdeg(dag.size());
        std::set<VarId> alive;
        for (VarId v = 0; v < dag.size(); ++v) {
            indeg[v] = dag.parents[v].size();
            outdeg[v] = dag.children[v].size();
            alive.insert(v);
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = alive.begin(); it != alive.end();) {
                if (indeg[*it] == 0 || outdeg[*it] == 0) {
                    for (VarId c : dag.children[*it]) --indeg[c];
                    for (VarId p : dag.parents[*it]) --outdeg[p];
                    it = alive.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        stuck.assign(alive.begin(), alive.end());
        error(ErrorCode::cycle, "arcs form a directed cycle through " + join_ids(diagram, stuck), stuck);
    }

    for (VarId v = 0; v < vars.size(); ++v) {
        const Variable& var = vars[v];
        auto parents = diagram.parents(v);
        std::set<VarId> parent_set(parents.begin(), parents.end());
        for (VarId p : parents) {
            if (vars[p].kind == VarKind::value) {
                error(ErrorCode::value_has_children, "value node " + vars[p].id + " has child " + var.id, {p, v});
            }
        }
        if (var.kind == VarKind::chance) {
            const Factor* f = diagram.cpt(v);
            if (f == nullptr) {
                error(ErrorCode::cpt_missing, var.id + " has no conditional probability table", {v});
                continue;
            }
            std::set<VarId> scope(f->scope().begin(), f->scope().end() - 1);
            if (f->scope().back() != v || scope != parent_set) {
                error(ErrorCode::cpt_scope_mismatch, "table of " + var.id + " does not match its parents", {v});
                continue;
            }
            if (f->min() < 0.0) {
                error(ErrorCode::negative_probability, var.id + " has a negative probability", {v});
            }
            const std::size_t card = var.cardinality();
            for (std::size_t row = 0; row < f->size() / card; ++row) {
                double s = 0.0;
                for (std::size_t k = 0; k < card; ++k) s += (*f)[row * card + k];
                if (std::abs(s - 1.0) > kCptTolerance) {
                    std::ostringstream msg;
                    msg << "row " << row << " of " << var.id << " sums to " << s;
                    error(ErrorCode::cpt_not_normalized, msg.str(), {v});
                    break;
                }
            }
        } else if (var.kind == VarKind::value) {
            const Factor* f = diagram.value_table(v);
            if (f == nullptr) {
                error(ErrorCode::value_table_missing, var.id + " has no value table", {v});
                continue;
            }
            std::set<VarId> scope(f->scope().begin(), f->scope().end());
            if (scope != parent_set) {
                error(ErrorCode::value_scope_mismatch, "value table of " + var.id + " does not match its parents", {v});
            }
        }
    }

    const auto values = diagram.value_nodes();
    if (values.empty()) {
        report.errors.push_back(Issue{ErrorCode::missing_value_node, "diagram has no value node", {}});
    } else if (values.size() > 1 && diagram.combination() == Combination::none) {
        error(ErrorCode::multiple_values_without_combination, "several value nodes need a sum or product combination",
              values);
    }

    const auto decisions = diagram.nodes_of_kind(VarKind::decision);
    const auto& order = diagram.decision_order();
    {
        std::set<VarId> seen;
        bool ok = order.size() == decisions.size();
        for (VarId d : order) {
            if (d >= vars.size() || vars[d].kind != VarKind::decision || !seen.insert(d).second) ok = false;
        }
        if (!ok) {
            report.errors.push_back(
                Issue{ErrorCode::decision_order_invalid, "decision order must list every decision exactly once", {}});
        } else if (topo) {
            for (std::size_t i = 0; i < order.size(); ++i) {
                const auto later = descendants_of(dag, order[i]);
                for (std::size_t j = 0; j < i; ++j) {
                    if (later.contains(order[j])) {
                        error(ErrorCode::decision_order_inconsistent,
                              vars[order[j]].id + " is a descendant of later decision " + vars[order[i]].id,
                              {order[j], order[i]});
                    }
                }
            }
            for (std::size_t i = 0; i < order.size(); ++i) {
                const auto pi = diagram.parents(order[i]);
                for (std::size_t j = i + 1; j < order.size(); ++j) {
                    const auto pj = diagram.parents(order[j]);
                    std::vector<VarId> missing;
                    if (std::find(pj.begin(), pj.end(), order[i]) == pj.end()) missing.push_back(order[i]);
                    for (VarId p : pi) {
                        if (std::find(pj.begin(), pj.end(), p) == pj.end()) missing.push_back(p);
                    }
                    if (!missing.empty()) {
                        missing.push_back(order[j]);
                        error(ErrorCode::no_forgetting_violated,
                              vars[order[j]].id + " forgets " + join_ids(diagram, {missing.begin(), missing.end() - 1}),
                              missing);
                    }
                }
            }
        }
    }

    for (const auto& [v, o] : diagram.evidence()) {
        if (v >= vars.size()) continue;
        if (vars[v].kind != VarKind::chance) {
            error(ErrorCode::evidence_not_chance, "evidence on non-chance variable " + vars[v].id, {v});
            continue;
        }
        if (o >= vars[v].cardinality()) {
            error(ErrorCode::evidence_out_of_range, "evidence outcome out of range for " + vars[v].id, {v});
        }
        if (topo) {
            for (VarId d : decisions) {
                if (descendants_of(dag, d).contains(v)) {
                    error(ErrorCode::evidence_after_decision,
                          "evidence " + vars[v].id + " is a descendant of decision " + vars[d].id, {v, d});
                }
            }
        }
    }

    for (VarId v = 0; v < vars.size(); ++v) {
        if (vars[v].kind != VarKind::value && dag.children[v].empty() && !diagram.is_evidence(v)) {
            report.warnings.push_back(Issue{ErrorCode::barren_node, vars[v].id + " has no children", {vars[v].id}});
        }
    }
    return report;
}

void require_valid(const InfluenceDiagram& diagram) {
    const auto report = validate(diagram);
    if (report.ok()) return;
    std::string msg;
    for (const auto& e : report.errors) {
        if (!msg.empty()) msg += "; ";
        msg += std::string(to_string(e.code)) + " (" + e.message + ")";
    }
    throw Error(ErrorCode::validation_failed, msg);
}

InfluenceDiagram complete_no_forgetting(const InfluenceDiagram& diagram) {
    InfluenceDiagram out = diagram;
    const auto& order = diagram.decision_order();
    for (std::size_t j = 1; j < order.size(); ++j) {
        // Parents of D^{j-1} already include everything remembered before it.
        const VarId prev = order[j - 1];
        for (VarId p : out.parents(prev)) out.add_arc(p, order[j]);
        out.add_arc(prev, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Relevance

std::vector<VarId> information_set(const InfluenceDiagram& diagram, VarId decision) {
    if (diagram.variable(decision).kind != VarKind::decision) {
        throw Error(ErrorCode::not_a_decision, diagram.variable(decision).id + " is not a decision");
    }
    std::vector<VarId> out;
    for (VarId p : diagram.parents(decision)) {
        if (!diagram.is_evidence(p)) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Relevance> relevance_analysis(const InfluenceDiagram& diagram) {
    const auto& order = diagram.decision_order();
    const auto values = diagram.value_nodes();
    std::set<VarId> evidence;
    for (const auto& [v, o] : diagram.evidence()) evidence.insert(v);

    std::vector<Relevance> out(order.size());
    for (std::size_t i = order.size(); i-- > 0;) {
        const VarId d = order[i];
        Dag dag = dag_of(diagram);
        for (std::size_t k = 0; k <= i; ++k) dag.remove_incoming(order[k]);
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            dag.remove_incoming(order[j]);
            for (VarId r : out[j].relevant) dag.add_arc(r, order[j]);
        }
        const auto info = information_set(diagram, d);
        std::set<VarId> given(info.begin(), info.end());
        given.insert(evidence.begin(), evidence.end());

        Relevance rel{d, {}, {}};
        const auto reach = d_connected(dag, {d}, given);
        for (VarId v : values) {
            if (reach.contains(v)) rel.values.push_back(v);
        }
        // A product couples its factors: influencing one means caring about all.
        if (diagram.combination() == Combination::product && !rel.values.empty()) rel.values = values;
        std::set<VarId> w(rel.values.begin(), rel.values.end());
        std::set<VarId> current(info.begin(), info.end());
        if (w.empty()) current.clear();
        bool changed = true;
        while (changed) {
            changed = false;
            for (VarId x : current) {
                std::set<VarId> cond = current;
                cond.erase(x);
                cond.insert(d);
                cond.insert(evidence.begin(), evidence.end());
                if (d_separated(dag, {x}, w, cond)) {
                    current.erase(x);
                    changed = true;
                    break;
                }
            }
        }
        rel.relevant.assign(current.begin(), current.end());
        out[i] = std::move(rel);
    }
    return out;
}

std::vector<VarId> relevant_information(const InfluenceDiagram& diagram, VarId decision) {
    const auto& order = diagram.decision_order();
    auto it = std::find(order.begin(), order.end(), decision);
    if (diagram.variable(decision).kind != VarKind::decision || it == order.end()) {
        throw Error(ErrorCode::not_a_decision, diagram.variable(decision).id + " is not an ordered decision");
    }
    return relevance_analysis(diagram)[static_cast<std::size_t>(it - order.begin())].relevant;
}

// ---------------------------------------------------------------------------
// Pruning

namespace {

/// Copy of `d` where each variable in `rooted` loses its parents and gets an
/// indicator table at its observed outcome.
InfluenceDiagram detach_evidence(const InfluenceDiagram& d, const std::set<VarId>& rooted) {
    InfluenceDiagram out;
    for (const auto& v : d.variables()) {
        switch (v.kind) {
            case VarKind::chance: out.add_chance(v.id, v.outcomes, v.name); break;
            case VarKind::decision: out.add_decision(v.id, v.outcomes, v.name); break;
            case VarKind::value: out.add_value(v.id, v.name); break;
        }
    }
    for (const auto& [p, c] : d.arcs()) {
        if (!rooted.contains(c)) out.add_arc(p, c);
    }
    for (const auto& [v, f] : d.cpts()) {
        if (rooted.contains(v)) {
            std::vector<double> ind(d.variable(v).cardinality(), 0.0);
            ind[d.evidence().at(v)] = 1.0;
            out.set_cpt(v, {}, std::move(ind));
        } else {
            out.set_cpt(v, {f.scope().begin(), f.scope().end() - 1}, f.values());
        }
    }
    for (const auto& [v, f] : d.value_tables()) out.set_value_table(v, f.scope(), f.values());
    out.set_combination(d.combination());
    out.set_decision_order(d.decision_order());
    for (const auto& [v, o] : d.evidence()) out.set_evidence(v, o);
    return out;
}

}  // namespace

PruneResult prune(const InfluenceDiagram& diagram, const std::set<VarId>& targets, PruneOptions options) {
    std::set<std::string> target_ids;
    for (VarId t : targets) target_ids.insert(diagram.variable(t).id);

    PruneResult result{diagram, {}, 1.0};
    bool changed = true;
    while (changed) {
        changed = false;
        InfluenceDiagram& cur = result.diagram;
        auto is_target = [&](VarId v) { return target_ids.contains(cur.variable(v).id); };

        if (options.remove_barren) {
            std::set<VarId> keep;
            for (VarId v = 0; v < cur.size(); ++v) keep.insert(v);
            const Dag dag = dag_of(cur);
            std::vector<std::size_t> live_children(cur.size());
            for (VarId v = 0; v < cur.size(); ++v) live_children[v] = dag.children[v].size();
            bool removed = true;
            while (removed) {
                removed = false;
                for (VarId v : keep) {
                    const auto kind = cur.variable(v).kind;
                    if (kind != VarKind::value && live_children[v] == 0 && !is_target(v) && !cur.is_evidence(v)) {
                        for (VarId p : dag.parents[v]) --live_children[p];
                        result.removed.push_back(cur.variable(v).id);
                        keep.erase(v);
                        removed = true;
                        break;
                    }
                }
            }
            if (keep.size() != cur.size()) {
                result.diagram = cur.subset(keep);
                changed = true;
                continue;
            }
        }

        if (options.remove_d_separated) {
            const Dag dag = dag_of(cur);
            std::set<VarId> evidence;
            for (const auto& [v, o] : cur.evidence()) evidence.insert(v);
            std::set<VarId> target_set;
            for (VarId v = 0; v < cur.size(); ++v) {
                if (is_target(v)) target_set.insert(v);
            }
            if (target_set.empty()) break;
            const auto reach = d_connected(dag, target_set, evidence);
            std::set<VarId> sep;
            for (VarId v = 0; v < cur.size(); ++v) {
                if (cur.variable(v).kind == VarKind::chance && !evidence.contains(v) && !is_target(v) &&
                    !reach.contains(v)) {
                    sep.insert(v);
                }
            }
            // Only remove a set whose children are removed too or are evidence
            // fed solely by the removed set and other evidence.
            bool shrunk = true;
            while (shrunk) {
                shrunk = false;
                for (VarId v : sep) {
                    bool ok = true;
                    for (VarId c : dag.children[v]) {
                        if (sep.contains(c)) continue;
                        if (!evidence.contains(c)) {
                            ok = false;
                            break;
                        }
                        for (VarId p : dag.parents[c]) {
                            if (!sep.contains(p) && !evidence.contains(p)) ok = false;
                        }
                    }
                    if (!ok) {
                        sep.erase(v);
                        shrunk = true;
                        break;
                    }
                }
            }
            if (!sep.empty()) {
                std::set<VarId> rooted;
                for (VarId v : sep) {
                    for (VarId c : dag.children[v]) {
                        if (evidence.contains(c)) rooted.insert(c);
                    }
                }
                std::vector<Factor> detached;
                for (VarId v : sep) detached.push_back(*cur.cpt(v));
                for (VarId v : rooted) detached.push_back(*cur.cpt(v));
                Factor joint = product(detached);
                Assignment ev;
                for (VarId v : joint.scope()) {
                    if (evidence.contains(v)) ev[v] = cur.evidence().at(v);
                }
                result.evidence_factor *= reduce(joint, ev).sum();

                std::set<VarId> keep;
                for (VarId v = 0; v < cur.size(); ++v) {
                    if (!sep.contains(v)) keep.insert(v);
                }
                for (VarId v : sep) result.removed.push_back(cur.variable(v).id);
                InfluenceDiagram detached_diagram = detach_evidence(cur, rooted);
                result.diagram = detached_diagram.subset(keep);
                changed = true;
            }
        }
    }
    return result;
}

}  // namespace idsolve
