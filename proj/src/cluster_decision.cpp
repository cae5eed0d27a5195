#include "idsolve/cluster_decision.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "backend_util.hpp"

namespace idsolve {

namespace {

bool in(const std::vector<VarId>& vs, VarId v) { return std::find(vs.begin(), vs.end(), v) != vs.end(); }

void insert_sorted(std::vector<VarId>& vs, VarId v) {
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) vs.insert(it, v);
}

}  // namespace

ExtractedRule decision_from_cluster(const Factor& potential, VarId decision, const std::vector<VarId>& relevant,
                                    std::optional<VarId> value_var) {
    std::vector<VarId> keep = relevant;
    keep.push_back(decision);
    if (!value_var || !potential.contains(*value_var)) {
        return extract_policy(detail::project(potential, keep), decision);
    }
    keep.push_back(*value_var);
    const Factor f = detail::project(potential, keep);
    const Factor slice0 = reduce(f, {{*value_var, 0}});
    const Factor slice1 = reduce(f, {{*value_var, 1}});
    if (slice0.size() > 0 && slice0.min() < 0.0) {
        throw Error(ErrorCode::negative_weight, "the Value=0 slice has a negative entry");
    }
    const std::vector<VarId> d{decision};
    return extract_policy(slice1, decision, marginalize_sum(slice0, d));
}

EvaluationResult solve_by_clustering(const InfluenceDiagram& diagram, const ClusterOptions& options) {
    const std::string backend = "cluster-" + std::string(to_string(options.mode));
    Network net;
    switch (options.mode) {
        case Encoding::rescaled_utility:
            try {
                net = to_belief_network(diagram, options.transform);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::degenerate_value) throw;
                return detail::degenerate_result(diagram, options.transform, backend);
            }
            break;
        case Encoding::valuation: net = to_valuation_network(diagram, options.transform); break;
        case Encoding::likelihood: net = to_likelihood_network(diagram, options.transform); break;
    }
    const auto families = detail::decision_families(net);
    auto constraints = families;
    if (options.mode == Encoding::valuation) {
        for (auto& c : constraints) c.push_back(*net.value_var);
    }
    // Decisions carry no table: the policy indicator is multiplied in later.
    const std::vector<Factor> tables = net.chance_tables();
    std::vector<std::vector<VarId>> scopes;
    for (const auto& t : tables) scopes.push_back(t.scope());
    ClusterTree tree = build_cluster_tree(scopes, net.cardinalities(), constraints);

    Assignment evidence = net.evidence;
    if (options.mode == Encoding::rescaled_utility) evidence[*net.value_var] = 1;
    initialize_potentials(tree, tables, evidence, options.evidence_mode);

    std::optional<ClusterTree> prob;
    if (options.mode == Encoding::likelihood) {
        prob = tree;
        std::vector<Factor> plain(tables.begin(), tables.end() - static_cast<std::ptrdiff_t>(net.value_factors.size()));
        initialize_potentials(*prob, plain, net.evidence, options.evidence_mode);
    }

    EvaluationResult out;
    out.diagnostics.backend = backend;
    for (const auto& c : tree.clusters) out.diagnostics.cluster_sizes.push_back(c.size());
    out.diagnostics.edges = tree.edges.size();

    std::vector<std::pair<std::size_t, Factor>> installed;
    std::vector<DecisionRule> rules;
    for (std::size_t i = net.decisions.size(); i-- > 0;) {
        const VarId d = net.decisions[i];
        const std::size_t c = tree.smallest_covering(constraints[i]);
        const auto col = collect(tree, c);
        out.diagnostics.messages += col.messages;
        ExtractedRule ex;
        if (options.mode == Encoding::valuation) {
            ex = decision_from_cluster(col.potential, d, net.decision_scopes[i], net.value_var);
        } else if (options.mode == Encoding::likelihood) {
            const auto pcol = collect(*prob, c);
            out.diagnostics.messages += pcol.messages;
            ex = extract_policy(detail::project(col.potential, families[i]), d,
                                detail::project(pcol.potential, net.decision_scopes[i]));
        } else {
            ex = decision_from_cluster(col.potential, d, net.decision_scopes[i]);
        }
        Factor table = detail::deterministic_table(net, i, ex.choice);
        tree.potentials[c] = multiply(tree.potentials[c], table);
        if (prob) prob->potentials[c] = multiply(prob->potentials[c], table);
        installed.emplace_back(c, std::move(table));
        rules.push_back(make_rule(net.variables, d, net.decision_scopes[i], std::move(ex)));
    }

    double pe = 0.0;
    if (options.mode == Encoding::rescaled_utility) {
        initialize_potentials(tree, tables, net.evidence, options.evidence_mode);
        for (const auto& [c, t] : installed) tree.potentials[c] = multiply(tree.potentials[c], t);
        const std::vector<VarId> q{*net.value_var};
        const auto col = collect(tree, tree.smallest_covering(q));
        out.diagnostics.messages += col.messages;
        const Factor pu = detail::project(col.potential, q);
        pe = pu.sum();
        if (!(pe > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
        out.meu = pu[1] / pe;
        out.mev = net.scale->unscale(*out.meu);
    } else if (options.mode == Encoding::valuation) {
        const std::vector<VarId> q{*net.value_var};
        const auto col = collect(tree, tree.smallest_covering(q));
        out.diagnostics.messages += col.messages;
        const Factor pv = detail::project(col.potential, q);
        pe = pv[0];
        if (!(pe > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
        out.mev = pv[1] / pv[0];
        out.diagnostics.root_v0 = pv[0];
        out.diagnostics.root_v1 = pv[1];
    } else {
        const auto col = collect(tree, 0);
        const auto pcol = collect(*prob, 0);
        out.diagnostics.messages += col.messages + pcol.messages;
        pe = pcol.potential.sum();
        if (!(pe > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
        out.mev = col.potential.sum() / pe;
    }
    out.evidence_probability = pe * net.evidence_factor;
    out.policy = detail::assemble_policy(diagram, rules);
    return out;
}

// ---------------------------------------------------------------------------
// One-directional trees

namespace {

struct Node {
    std::vector<VarId> vars;
    std::size_t parent = ClusterTree::npos;
    std::vector<VarId> eliminated;
    bool alive = true;
};

std::vector<std::size_t> elimination_parents(const Elimination& elim) {
    std::vector<std::size_t> parent(elim.order.size(), ClusterTree::npos);
    for (std::size_t k = 0; k < elim.order.size(); ++k) {
        for (VarId v : elim.cliques[k]) {
            if (v != elim.order[k]) parent[k] = std::min(parent[k], elim.step[v]);
        }
    }
    return parent;
}

bool is_ancestor(const std::vector<std::size_t>& parent, std::size_t anc, std::size_t node) {
    for (std::size_t c = parent[node]; c != ClusterTree::npos; c = parent[c]) {
        if (c == anc) return true;
    }
    return false;
}

}  // namespace

RootedClusterTree build_one_directional_tree(const Network& net, const OneDirectionalOptions& options) {
    if (!net.value_var) {
        throw Error(ErrorCode::invalid_argument, "a one-directional tree needs a Value variable");
    }
    const VarId value = *net.value_var;
    const std::size_t n = net.size();
    const std::size_t m = net.decisions.size();

    RootedClusterTree out;
    out.decisions = net.decisions;
    out.decision_scopes = net.decision_scopes;
    out.information_sets = net.information_sets;
    out.value_var = value;
    out.evidence = net.evidence;
    out.value_everywhere = options.value_everywhere;

    std::vector<std::vector<VarId>> families;
    for (const auto& [v, f] : net.tables) {
        if (net.is_decision(v)) continue;
        out.tables.push_back(f);
        std::vector<VarId> fam = f.scope();
        if (v == value && !options.value_everywhere) fam.pop_back();
        if (!fam.empty()) families.push_back(std::move(fam));
    }
    for (auto& fam : detail::decision_families(net)) families.push_back(std::move(fam));

    // Reverse temporal groups.
    std::vector<std::size_t> first_use(n, ClusterTree::npos);
    for (std::size_t i = 0; i < m; ++i) {
        for (VarId x : net.decision_scopes[i]) {
            if (!net.is_decision(x)) first_use[x] = std::min(first_use[x], i);
        }
    }
    TriangulationOptions tri;
    std::vector<VarId> unobserved;
    for (VarId v = 0; v < n; ++v) {
        if (v != value && !net.is_decision(v) && first_use[v] == ClusterTree::npos) unobserved.push_back(v);
    }
    tri.groups.push_back(unobserved);
    for (std::size_t i = m; i-- > 0;) {
        tri.groups.push_back({net.decisions[i]});
        std::vector<VarId> observed;
        for (VarId v = 0; v < n; ++v) {
            if (first_use[v] == i) observed.push_back(v);
        }
        tri.groups.push_back(observed);
    }

    Elimination elim;
    std::vector<std::size_t> parent;
    for (;;) {
        elim = eliminate(families, {}, n, tri);
        parent = elimination_parents(elim);
        bool repaired = false;
        for (std::size_t i = m; i-- > 1;) {
            const std::size_t later = elim.step[net.decisions[i]];
            const std::size_t earlier = elim.step[net.decisions[i - 1]];
            if (!is_ancestor(parent, earlier, later)) {
                families.push_back({net.decisions[i - 1], net.decisions[i]});
                ++out.repairs;
                repaired = true;
                break;
            }
        }
        if (!repaired) break;
    }

    const std::size_t steps = elim.order.size();
    std::vector<Node> nodes(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        nodes[k].vars = elim.cliques[k];
        nodes[k].parent = parent[k];
        nodes[k].eliminated = {elim.order[k]};
    }
    std::size_t root = ClusterTree::npos;
    if (options.value_everywhere && elim.step[value] != ClusterTree::npos) {
        root = elim.step[value];
        nodes[root].eliminated.clear();
    } else {
        root = nodes.size();
        nodes.push_back(Node{{value}, ClusterTree::npos, {}, true});
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (k != root && nodes[k].parent == ClusterTree::npos) nodes[k].parent = root;
    }

    // A sender absorbs its receiver when the receiver adds no variable and
    // was formed by a chance variable: the message then maximizes at most one
    // decision and sums the rest.
    std::vector<std::size_t> owner(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) owner[k] = k;
    for (std::size_t k = 0; k < steps; ++k) {
        if (!nodes[k].alive || k == root) continue;
        for (;;) {
            const std::size_t p = nodes[k].parent;
            if (p == root || p == ClusterTree::npos) break;
            if (nodes[p].eliminated.empty() || net.is_decision(nodes[p].eliminated.front())) break;
            if (!std::includes(nodes[k].vars.begin(), nodes[k].vars.end(), nodes[p].vars.begin(),
                               nodes[p].vars.end())) {
                break;
            }
            nodes[k].eliminated.insert(nodes[k].eliminated.end(), nodes[p].eliminated.begin(),
                                       nodes[p].eliminated.end());
            nodes[k].parent = nodes[p].parent;
            for (auto& other : nodes) {
                if (other.alive && other.parent == p) other.parent = k;
            }
            nodes[p].parent = k;
            nodes[p].alive = false;
            for (auto& o : owner) {
                if (o == p) o = k;
            }
        }
    }

    const auto bucket = [&](const std::vector<VarId>& scope) {
        std::size_t first = ClusterTree::npos;
        for (VarId v : scope) {
            if (v == value && !options.value_everywhere) continue;
            first = std::min(first, elim.step[v]);
        }
        return first == ClusterTree::npos ? root : owner[first];
    };

    if (!options.value_everywhere) {
        const Factor& vt = net.tables.at(value);
        for (std::size_t c = bucket(vt.scope()); c != ClusterTree::npos; c = nodes[c].parent) {
            insert_sorted(nodes[c].vars, value);
        }
    }

    std::vector<std::size_t> index(nodes.size(), ClusterTree::npos);
    std::vector<std::vector<VarId>> clusters;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (nodes[k].alive) {
            index[k] = clusters.size();
            clusters.push_back(nodes[k].vars);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    out.child.assign(clusters.size(), ClusterTree::npos);
    out.drops.assign(clusters.size(), {});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (!nodes[k].alive || k == root) continue;
        const std::size_t a = index[k];
        const std::size_t b = index[nodes[k].parent];
        edges.emplace_back(a, b);
        out.child[a] = b;
        // Decisions first, then chance variables in elimination order.
        std::vector<VarId> drop;
        for (VarId v : nodes[k].eliminated) {
            if (net.is_decision(v)) drop.push_back(v);
        }
        for (VarId v : nodes[k].eliminated) {
            if (!net.is_decision(v)) drop.push_back(v);
        }
        out.drops[a] = std::move(drop);
    }
    out.tree = make_cluster_tree(std::move(clusters), edges, net.cardinalities());
    out.root = index[root];
    for (VarId d : net.decisions) out.decision_cluster.push_back(index[owner[elim.step[d]]]);
    for (const auto& t : out.tables) out.table_cluster.push_back(index[bucket(t.scope())]);

    const auto problems = check_one_directional(out);
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
        throw Error(ErrorCode::one_directional_check_failed, msg);
    }
    return out;
}

std::vector<std::string> check_one_directional(const RootedClusterTree& t) {
    std::vector<std::string> problems;
    const auto& cl = t.tree.clusters;
    const std::size_t n = cl.size();
    if (t.root >= n || t.child.size() != n || t.drops.size() != n) {
        return {"malformed rooted tree"};
    }
    const auto has = [&](std::size_t c, VarId v) { return std::binary_search(cl[c].begin(), cl[c].end(), v); };

    for (std::size_t c = 0; c < n; ++c) {
        if ((t.child[c] == ClusterTree::npos) != (c == t.root)) problems.push_back("root is not the unique childless cluster");
        std::size_t hops = 0;
        for (std::size_t x = c; x != t.root; x = t.child[x]) {
            if (x == ClusterTree::npos || ++hops > n) {
                problems.push_back("cluster " + std::to_string(c) + " does not reach the root");
                break;
            }
        }
    }
    if (!problems.empty()) return problems;
    if (!has_running_intersection(t.tree)) problems.push_back("running intersection fails");
    for (VarId v : cl[t.root]) {
        if (v != t.value_var) problems.push_back("root holds a variable other than Value");
    }

    const auto ancestor = [&](std::size_t anc, std::size_t c) {
        for (std::size_t x = t.child[c]; x != ClusterTree::npos; x = t.child[x]) {
            if (x == anc) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < t.decisions.size(); ++i) {
        const VarId d = t.decisions[i];
        const std::size_t c = t.decision_cluster.at(i);
        if (!has(c, d)) problems.push_back("decision cluster lacks its decision");
        for (VarId r : t.decision_scopes[i]) {
            if (!has(c, r)) problems.push_back("decision cluster lacks relevant information");
        }
        for (VarId v : cl[c]) {
            if (v != d && v != t.value_var && !in(t.information_sets[i], v) && !t.evidence.contains(v)) {
                problems.push_back("decision cluster holds an unobserved variable");
            }
        }
        if (c == t.root || has(t.child[c], d)) problems.push_back("child of a decision cluster holds the decision");
        if (i > 0 && !ancestor(t.decision_cluster[i - 1], c)) {
            problems.push_back("decision clusters are not on one path in reverse order");
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (c != t.root && has(c, t.value_var) && !has(t.child[c], t.value_var)) {
            problems.push_back("a Value cluster sends to a cluster without Value");
        }
        bool seen_chance = false;
        for (VarId v : t.drops[c]) {
            const bool decision = in(t.decisions, v);
            if (decision && seen_chance) problems.push_back("a chance variable is summed before a decision is maximized");
            if (!decision) seen_chance = true;
        }
    }
    for (std::size_t k = 0; k < t.tables.size(); ++k) {
        if (!t.tree.covers(t.table_cluster[k], t.tables[k].scope())) problems.push_back("a table is not covered");
    }
    std::sort(problems.begin(), problems.end());
    problems.erase(std::unique(problems.begin(), problems.end()), problems.end());
    return problems;
}

namespace {

std::vector<Factor> initial_potentials(const RootedClusterTree& t) {
    std::vector<Factor> pot;
    for (const auto& c : t.tree.clusters) {
        std::vector<std::size_t> cards;
        for (VarId v : c) cards.push_back(t.tree.cards[v]);
        pot.push_back(Factor::filled(c, cards, 1.0));
    }
    for (std::size_t k = 0; k < t.tables.size(); ++k) {
        pot[t.table_cluster[k]] = multiply(pot[t.table_cluster[k]], t.tables[k]);
    }
    for (const auto& [v, o] : t.evidence) {
        const std::vector<VarId> scope{v};
        const std::size_t c = t.tree.smallest_covering(scope);
        if (c != ClusterTree::npos) pot[c] = multiply(pot[c], Factor::indicator(v, t.tree.cards[v], o));
    }
    return pot;
}

struct Selection {
    Factor rest;
    std::vector<VarId> scope;
    ExtractedRule rule;
};

/// Maximizes `d` out of `psi`: the maximizer is taken on the Value=1 slice
/// and applied to both slices.
Selection select_decision(const Factor& psi, VarId d, std::optional<VarId> value) {
    const bool has_value = value && psi.contains(*value);
    Selection out;
    for (VarId v : psi.scope()) {
        if (v != d && (!has_value || v != *value)) out.scope.push_back(v);
    }
    std::vector<VarId> order = out.scope;
    if (has_value) order.push_back(*value);
    order.push_back(d);
    const Factor a = align(psi, order);
    const std::size_t n = psi.cardinality(d);
    const std::size_t slices = has_value ? 2 : 1;
    const std::size_t rows = a.size() / (n * slices);
    std::vector<double> values;
    values.reserve(rows * slices);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t base = r * slices * n;
        const std::size_t top = base + (slices - 1) * n;
        double weight = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (a[base + k] < 0.0) throw Error(ErrorCode::negative_weight, "probability slice has a negative entry");
            weight = std::max(weight, a[base + k]);
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (a[top + k] > a[top + best]) best = k;
        }
        if (!(weight > 0.0)) {
            best = 0;
            out.rule.zero_rows.push_back(r);
        }
        out.rule.choice.push_back(best);
        for (std::size_t s = 0; s < slices; ++s) values.push_back(a[base + s * n + best]);
    }
    std::vector<VarId> scope = out.scope;
    std::vector<std::size_t> cards;
    for (VarId v : scope) cards.push_back(psi.cardinality(v));
    if (has_value) {
        scope.push_back(*value);
        cards.push_back(2);
    }
    out.rest = Factor(scope, cards, values, psi.semantics());
    return out;
}

/// Rule over `relevant` when the choice never depends on the other
/// variables of `scope` at positive-probability rows; nullopt otherwise.
std::optional<ExtractedRule> project_rule(const ExtractedRule& rule, const std::vector<VarId>& scope,
                                          const std::vector<std::size_t>& cards,
                                          const std::vector<VarId>& relevant) {
    std::vector<std::size_t> rcards;
    for (VarId r : relevant) rcards.push_back(cards[static_cast<std::size_t>(std::find(scope.begin(), scope.end(), r) - scope.begin())]);
    const std::size_t rrows = ConfigCounter::count(rcards);
    std::vector<std::optional<std::size_t>> pick(rrows);
    std::set<std::size_t> zero(rule.zero_rows.begin(), rule.zero_rows.end());
    std::size_t row = 0;
    for (ConfigCounter c(cards); !c.done(); c.next(), ++row) {
        if (zero.contains(row)) continue;
        std::size_t flat = 0;
        for (std::size_t k = 0; k < relevant.size(); ++k) {
            const auto pos = static_cast<std::size_t>(std::find(scope.begin(), scope.end(), relevant[k]) - scope.begin());
            flat = flat * rcards[k] + c.digits()[pos];
        }
        if (pick[flat] && *pick[flat] != rule.choice[row]) return std::nullopt;
        pick[flat] = rule.choice[row];
    }
    ExtractedRule out;
    for (std::size_t r = 0; r < rrows; ++r) {
        out.choice.push_back(pick[r].value_or(0));
        if (!pick[r]) out.zero_rows.push_back(r);
    }
    return out;
}

std::vector<std::size_t> post_order(const RootedClusterTree& t) {
    std::vector<std::vector<std::size_t>> senders(t.tree.size());
    for (std::size_t c = 0; c < t.tree.size(); ++c) {
        if (t.child[c] != ClusterTree::npos) senders[t.child[c]].push_back(c);
    }
    std::vector<std::size_t> order;
    std::function<void(std::size_t)> visit = [&](std::size_t c) {
        for (std::size_t s : senders[c]) visit(s);
        order.push_back(c);
    };
    visit(t.root);
    return order;
}

}  // namespace

EvaluationResult single_pass_solve(const RootedClusterTree& t, const Network& net, const InfluenceDiagram& original,
                                   SinglePassTrace* trace) {
    const auto problems = check_one_directional(t);
    if (!problems.empty()) throw Error(ErrorCode::one_directional_check_failed, problems.front());

    SinglePassTrace local;
    SinglePassTrace& tr = trace != nullptr ? *trace : local;
    const std::size_t m = t.decisions.size();
    tr = SinglePassTrace{};
    tr.partial.resize(m);
    tr.rule_scope.resize(m);
    tr.rules.resize(m);

    std::vector<Factor> pot = initial_potentials(t);
    std::vector<std::optional<Factor>> inbox(t.tree.size());
    std::vector<DecisionRule> rules;
    Factor root_potential;
    for (std::size_t c : post_order(t)) {
        Factor psi = pot[c];
        // Incoming messages were multiplied in as they arrived.
        if (inbox[c]) psi = multiply(psi, *inbox[c]);
        if (c == t.root) {
            root_potential = psi;
            break;
        }
        for (VarId v : t.drops[c]) {
            if (!in(t.decisions, v)) {
                const std::vector<VarId> one{v};
                psi = marginalize_sum(psi, one);
                continue;
            }
            const std::size_t i = static_cast<std::size_t>(std::find(t.decisions.begin(), t.decisions.end(), v) -
                                                           t.decisions.begin());
            tr.partial[i] = psi;
            Selection sel = select_decision(psi, v, t.value_var);
            psi = std::move(sel.rest);
            std::vector<std::size_t> cards;
            for (VarId s : sel.scope) cards.push_back(t.tree.cards[s]);
            if (auto projected = project_rule(sel.rule, sel.scope, cards, t.decision_scopes[i])) {
                tr.rule_scope[i] = t.decision_scopes[i];
                tr.rules[i] = std::move(*projected);
            } else {
                tr.rule_scope[i] = sel.scope;
                tr.rules[i] = std::move(sel.rule);
            }
        }
        const std::size_t to = t.child[c];
        inbox[to] = inbox[to] ? multiply(*inbox[to], psi) : psi;
        ++tr.messages;
    }

    for (std::size_t i = 0; i < m; ++i) {
        rules.push_back(make_rule(net.variables, t.decisions[i], tr.rule_scope[i], tr.rules[i]));
    }
    const std::vector<VarId> q{t.value_var};
    const Factor pv = detail::project(root_potential, q);
    if (!(pv[0] > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
    EvaluationResult out;
    const double ratio = pv[1] / pv[0];
    if (net.scale) {
        out.meu = ratio;
        out.mev = net.scale->unscale(ratio);
    } else {
        out.mev = ratio;
    }
    out.evidence_probability = pv[0] * net.evidence_factor;
    out.policy = detail::assemble_policy(original, rules);
    out.diagnostics.backend = "onedir";
    out.diagnostics.messages = tr.messages;
    out.diagnostics.edges = t.tree.edges.size();
    for (const auto& c : t.tree.clusters) out.diagnostics.cluster_sizes.push_back(c.size());
    out.diagnostics.root_v0 = pv[0];
    out.diagnostics.root_v1 = pv[1];
    if (t.repairs > 0) out.diagnostics.notes.push_back("decision-order repair arcs: " + std::to_string(t.repairs));
    return out;
}

OneDirectionalRun run_one_directional(const InfluenceDiagram& diagram, const SinglePassOptions& options) {
    OneDirectionalRun run;
    run.net = to_valuation_network(diagram, options.transform);
    if (options.mode == Encoding::rescaled_utility) {
        if (!(run.net.range.v_max > run.net.range.v_min)) {
            run.result = detail::degenerate_result(diagram, options.transform, "onedir-rescaled");
            return run;
        }
        run.net.scale = run.net.range;
        run.net.encoding = Encoding::rescaled_utility;
        auto& vals = run.net.tables.at(*run.net.value_var).values();
        for (std::size_t k = 1; k < vals.size(); k += 2) vals[k] = run.net.scale->rescale(vals[k]);
    } else if (options.mode != Encoding::valuation) {
        throw Error(ErrorCode::invalid_argument, "single-pass evaluation supports the valuation and rescaled modes");
    }
    run.tree = build_one_directional_tree(run.net, options.tree);
    run.result = single_pass_solve(run.tree, run.net, diagram, &run.trace);
    run.result.diagnostics.backend = "onedir-" + std::string(to_string(options.mode));
    return run;
}

EvaluationResult solve_one_directional(const InfluenceDiagram& diagram, const SinglePassOptions& options) {
    return run_one_directional(diagram, options).result;
}

std::vector<Factor> full_collect_potentials(const RootedClusterTree& t, const Network& net,
                                            const SinglePassTrace& trace) {
    std::vector<Factor> out;
    for (std::size_t i = 0; i < t.decisions.size(); ++i) {
        ClusterTree tree = t.tree;
        tree.potentials = initial_potentials(t);
        for (std::size_t j = i + 1; j < t.decisions.size(); ++j) {
            std::vector<VarId> scope = trace.rule_scope[j];
            std::vector<std::size_t> cards;
            for (VarId v : scope) cards.push_back(net.variables[v].cardinality());
            const std::size_t n = net.variables[t.decisions[j]].cardinality();
            scope.push_back(t.decisions[j]);
            cards.push_back(n);
            std::vector<double> values(trace.rules[j].choice.size() * n, 0.0);
            for (std::size_t r = 0; r < trace.rules[j].choice.size(); ++r) values[r * n + trace.rules[j].choice[r]] = 1.0;
            const std::size_t c = t.decision_cluster[j];
            tree.potentials[c] = multiply(tree.potentials[c], Factor(scope, cards, values));
        }
        out.push_back(collect(tree, t.decision_cluster[i]).potential);
    }
    return out;
}

SinglePassCheck verify_single_pass(const RootedClusterTree& t, const Network& net, const SinglePassTrace& trace) {
    SinglePassCheck check;
    if (trace.messages != t.tree.edges.size()) {
        check.ok = false;
        check.detail = "sent " + std::to_string(trace.messages) + " messages over " +
                       std::to_string(t.tree.edges.size()) + " edges";
        return check;
    }
    const auto full = full_collect_potentials(t, net, trace);
    for (std::size_t i = 0; i < t.decisions.size(); ++i) {
        const VarId d = t.decisions[i];
        std::vector<VarId> rest;
        for (VarId v : trace.partial[i].scope()) {
            if (v != d && v != t.value_var) rest.push_back(v);
        }
        std::vector<VarId> order = rest;
        const bool has_value = trace.partial[i].contains(t.value_var);
        if (has_value) order.push_back(t.value_var);
        order.push_back(d);
        const Factor p = align(trace.partial[i], order);
        const Factor f = align(detail::project(full[i], order), order);
        const std::size_t n = net.variables[d].cardinality();
        const std::size_t slices = has_value ? 2 : 1;
        for (std::size_t r = 0; r < p.size() / (n * slices); ++r) {
            const std::size_t base = r * slices * n;
            const std::size_t top = base + (slices - 1) * n;
            double weight = 0.0;
            for (std::size_t k = 0; k < n; ++k) weight = std::max(weight, f[base + k]);
            if (!(weight > 1e-300)) continue;
            auto argmax_set = [&](const Factor& g) {
                double hi = g[top];
                double scale = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    hi = std::max(hi, g[top + k]);
                    scale = std::max(scale, std::abs(g[top + k]));
                }
                std::vector<std::size_t> s;
                for (std::size_t k = 0; k < n; ++k) {
                    if (g[top + k] >= hi - 1e-12 * std::max(scale, 1e-300)) s.push_back(k);
                }
                return s;
            };
            ++check.rows_compared;
            if (argmax_set(p) != argmax_set(f)) {
                check.ok = false;
                check.detail = "decision " + net.variables[d].id + " row " + std::to_string(r) + " differs";
                return check;
            }
        }
    }
    return check;
}

std::string to_dot(const RootedClusterTree& t, const Network& net) {
    std::ostringstream os;
    os << "digraph onedir {\n";
    for (std::size_t c = 0; c < t.tree.size(); ++c) {
        os << "  c" << c << " [label=\"";
        for (std::size_t k = 0; k < t.tree.clusters[c].size(); ++k) {
            os << (k ? " " : "") << net.variables[t.tree.clusters[c][k]].id;
        }
        os << "\"" << (c == t.root ? ", shape=box" : "") << "];\n";
    }
    for (std::size_t c = 0; c < t.tree.size(); ++c) {
        if (t.child[c] == ClusterTree::npos) continue;
        os << "  c" << c << " -> c" << t.child[c] << " [label=\"";
        bool first = true;
        for (VarId v : t.drops[c]) {
            os << (first ? "" : ", ") << (in(t.decisions, v) ? "max " : "sum ") << net.variables[v].id;
            first = false;
        }
        os << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace idsolve
