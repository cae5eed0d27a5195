#include "idsolve/inference.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace idsolve {

std::vector<std::size_t> ClusterTree::neighbors(std::size_t c) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
        if (e.a == c) out.push_back(e.b);
        if (e.b == c) out.push_back(e.a);
    }
    return out;
}

bool ClusterTree::covers(std::size_t c, std::span<const VarId> scope) const {
    const auto& cl = clusters[c];
    return std::all_of(scope.begin(), scope.end(),
                       [&](VarId v) { return std::binary_search(cl.begin(), cl.end(), v); });
}

std::size_t ClusterTree::smallest_covering(std::span<const VarId> scope) const {
    std::size_t best = npos;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (covers(c, scope) && (best == npos || clusters[c].size() < clusters[best].size())) best = c;
    }
    return best;
}

std::size_t ClusterTree::largest_cluster() const {
    std::size_t out = 0;
    for (const auto& c : clusters) out = std::max(out, c.size());
    return out;
}

Elimination eliminate(std::span<const std::vector<VarId>> families, std::span<const std::vector<VarId>> constraints,
                      std::size_t num_vars, const TriangulationOptions& options) {
    std::vector<std::set<VarId>> adj(num_vars);
    std::vector<bool> present(num_vars, false);
    auto connect = [&](const std::vector<VarId>& set) {
        for (VarId a : set) {
            present[a] = true;
            for (VarId b : set) {
                if (a != b) adj[a].insert(b);
            }
        }
    };
    for (const auto& f : families) connect(f);
    for (const auto& c : constraints) connect(c);

    std::vector<std::size_t> group_of(num_vars, options.groups.size());
    for (std::size_t g = 0; g < options.groups.size(); ++g) {
        for (VarId v : options.groups[g]) {
            if (v < num_vars && group_of[v] == options.groups.size()) group_of[v] = g;
        }
    }

    Elimination out;
    out.step.assign(num_vars, ClusterTree::npos);
    std::size_t remaining = static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
    while (remaining > 0) {
        std::size_t group = options.groups.size();
        for (VarId v = 0; v < num_vars; ++v) {
            if (present[v]) group = std::min(group, group_of[v]);
        }
        VarId best = 0;
        std::size_t best_fill = ClusterTree::npos;
        for (VarId v = 0; v < num_vars; ++v) {
            if (!present[v] || group_of[v] != group) continue;
            std::size_t fill = 0;
            for (auto i = adj[v].begin(); i != adj[v].end(); ++i) {
                for (auto j = std::next(i); j != adj[v].end(); ++j) {
                    if (!adj[*i].contains(*j)) ++fill;
                }
            }
            if (fill < best_fill) {
                best_fill = fill;
                best = v;
            }
        }
        std::vector<VarId> clique(adj[best].begin(), adj[best].end());
        clique.push_back(best);
        std::sort(clique.begin(), clique.end());
        for (VarId a : adj[best]) {
            for (VarId b : adj[best]) {
                if (a != b) adj[a].insert(b);
            }
            adj[a].erase(best);
        }
        adj[best].clear();
        present[best] = false;
        out.step[best] = out.order.size();
        out.order.push_back(best);
        out.cliques.push_back(std::move(clique));
        --remaining;
    }
    return out;
}

namespace {

bool subset_of(const std::vector<VarId>& a, const std::vector<VarId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<VarId> intersect(const std::vector<VarId>& a, const std::vector<VarId>& b) {
    std::vector<VarId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

ClusterTree build_cluster_tree(std::span<const std::vector<VarId>> families, std::vector<std::size_t> cards,
                               std::span<const std::vector<VarId>> constraints, const TriangulationOptions& options) {
    const Elimination elim = eliminate(families, constraints, cards.size(), options);
    const std::size_t n = elim.order.size();

    // Elimination tree: each clique hangs off the clique of the first
    // eliminated variable among its remaining neighbours.
    std::vector<std::set<std::size_t>> adj(n);
    std::vector<std::size_t> roots;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t parent = ClusterTree::npos;
        for (VarId v : elim.cliques[k]) {
            if (v != elim.order[k] && (parent == ClusterTree::npos || elim.step[v] < parent)) parent = elim.step[v];
        }
        if (parent == ClusterTree::npos) {
            roots.push_back(k);
        } else {
            adj[k].insert(parent);
            adj[parent].insert(k);
        }
    }
    // Disconnected components meet through empty separators.
    for (std::size_t r = 0; r + 1 < roots.size(); ++r) {
        adj[roots[r]].insert(roots.back());
        adj[roots.back()].insert(roots[r]);
    }

    std::vector<std::vector<VarId>> clusters = elim.cliques;
    std::vector<bool> alive(n, true);
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < n && !merged; ++a) {
            if (!alive[a]) continue;
            for (std::size_t b : adj[a]) {
                if (!subset_of(clusters[a], clusters[b])) continue;
                for (std::size_t c : adj[a]) {
                    if (c == b) continue;
                    adj[c].erase(a);
                    adj[c].insert(b);
                    adj[b].insert(c);
                }
                adj[b].erase(a);
                adj[a].clear();
                alive[a] = false;
                merged = true;
                break;
            }
        }
    }

    std::vector<std::size_t> index(n, ClusterTree::npos);
    std::vector<std::vector<VarId>> kept;
    for (std::size_t k = 0; k < n; ++k) {
        if (alive[k]) {
            index[k] = kept.size();
            kept.push_back(clusters[k]);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b : adj[a]) {
            if (alive[a] && alive[b] && a < b) edges.emplace_back(index[a], index[b]);
        }
    }
    std::sort(edges.begin(), edges.end());
    return make_cluster_tree(std::move(kept), edges, std::move(cards));
}

ClusterTree build_cluster_tree(const Network& net, std::span<const std::vector<VarId>> constraints) {
    std::vector<std::vector<VarId>> families;
    for (const auto& [v, f] : net.tables) families.push_back(f.scope());
    for (const auto& f : net.value_factors) families.push_back(f.scope());
    return build_cluster_tree(families, net.cardinalities(), constraints);
}

ClusterTree make_cluster_tree(std::vector<std::vector<VarId>> clusters,
                              const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                              std::vector<std::size_t> cards) {
    ClusterTree tree;
    for (auto& c : clusters) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    tree.clusters = std::move(clusters);
    for (const auto& [a, b] : edges) {
        if (a >= tree.clusters.size() || b >= tree.clusters.size() || a == b) {
            throw Error(ErrorCode::invalid_argument, "cluster edge endpoint out of range");
        }
        tree.edges.push_back(ClusterEdge{a, b, intersect(tree.clusters[a], tree.clusters[b])});
    }
    tree.cards = std::move(cards);
    tree.assigned.assign(tree.clusters.size(), {});
    return tree;
}

void initialize_potentials(ClusterTree& tree, std::span<const Factor> tables, const Assignment& evidence,
                           EvidenceMode mode) {
    initialize_potentials(tree, tables, evidence, mode,
                          [&tree](std::span<const VarId> scope) { return tree.smallest_covering(scope); });
}

void initialize_potentials(ClusterTree& tree, std::span<const Factor> tables, const Assignment& evidence,
                           EvidenceMode mode, const std::function<std::size_t(std::span<const VarId>)>& place) {
    tree.potentials.clear();
    tree.assigned.assign(tree.size(), {});
    for (const auto& cl : tree.clusters) {
        std::vector<VarId> scope;
        std::vector<std::size_t> cards;
        for (VarId v : cl) {
            if (mode == EvidenceMode::reduce && evidence.contains(v)) continue;
            scope.push_back(v);
            cards.push_back(tree.cards.at(v));
        }
        tree.potentials.push_back(Factor::filled(scope, cards, 1.0));
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::size_t c = place(tables[i].scope());
        if (c == ClusterTree::npos || c >= tree.size()) {
            throw Error(ErrorCode::uncovered_table, "no cluster covers a table with " +
                                                        std::to_string(tables[i].scope().size()) + " variables");
        }
        tree.assigned[c].push_back(i);
        if (mode == EvidenceMode::reduce) {
            Assignment local;
            for (VarId v : tables[i].scope()) {
                if (evidence.contains(v)) local[v] = evidence.at(v);
            }
            tree.potentials[c] = multiply(tree.potentials[c], reduce(tables[i], local));
        } else {
            tree.potentials[c] = multiply(tree.potentials[c], tables[i]);
        }
    }
    if (mode == EvidenceMode::indicator) {
        for (const auto& [v, o] : evidence) {
            const std::vector<VarId> scope{v};
            const std::size_t c = tree.smallest_covering(scope);
            if (c == ClusterTree::npos) continue;
            tree.potentials[c] = multiply(tree.potentials[c], Factor::indicator(v, tree.cards.at(v), o));
        }
    }
}

namespace {

Factor gather(const ClusterTree& tree, std::size_t c, std::size_t from, std::size_t& messages) {
    Factor psi = tree.potentials.at(c);
    for (std::size_t nb : tree.neighbors(c)) {
        if (nb == from) continue;
        Factor incoming = gather(tree, nb, c, messages);
        const auto& sep = intersect(tree.clusters[nb], tree.clusters[c]);
        std::vector<VarId> drop;
        for (VarId v : incoming.scope()) {
            if (!std::binary_search(sep.begin(), sep.end(), v)) drop.push_back(v);
        }
        psi = multiply(psi, marginalize_sum(incoming, drop));
        ++messages;
    }
    return psi;
}

}  // namespace

CollectResult collect(const ClusterTree& tree, std::size_t target) {
    if (target >= tree.size()) throw Error(ErrorCode::invalid_argument, "collect target out of range");
    if (tree.potentials.size() != tree.size()) {
        throw Error(ErrorCode::invalid_argument, "cluster potentials are not initialized");
    }
    CollectResult out;
    out.potential = gather(tree, target, ClusterTree::npos, out.messages);
    return out;
}

MarginalResult marginal(const ClusterTree& tree, std::span<const VarId> query) {
    std::vector<VarId> q(query.begin(), query.end());
    std::sort(q.begin(), q.end());
    const std::size_t c = tree.smallest_covering(q);
    if (c == ClusterTree::npos) {
        throw Error(ErrorCode::invalid_argument, "no cluster contains the query variables");
    }
    const Factor joint_full = collect(tree, c).potential;
    std::vector<VarId> drop;
    for (VarId v : joint_full.scope()) {
        if (std::find(query.begin(), query.end(), v) == query.end()) drop.push_back(v);
    }
    Factor joint = align(marginalize_sum(joint_full, drop), query);
    const double pe = joint.sum();
    if (!(pe > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
    for (double& x : joint.values()) x /= pe;
    return MarginalResult{std::move(joint), pe};
}

double evidence_probability(const Network& net) {
    std::vector<Factor> tables;
    for (const auto& [v, f] : net.tables) {
        // Uniform decision tables stay: chance CPTs conditioned on a decision
        // only sum to one against them.
        if (!net.value_var || v != *net.value_var) tables.push_back(f);
    }
    if (tables.empty()) return net.evidence_factor;
    std::vector<std::vector<VarId>> families;
    for (const auto& f : tables) families.push_back(f.scope());
    ClusterTree tree = build_cluster_tree(families, net.cardinalities());
    initialize_potentials(tree, tables, net.evidence);
    // Components are joined by empty separators, so one collect covers all.
    return collect(tree, 0).potential.sum() * net.evidence_factor;
}

bool is_tree(const ClusterTree& tree) {
    const std::size_t n = tree.size();
    if (n == 0) return tree.edges.empty();
    if (tree.edges.size() != n - 1) return false;
    std::vector<std::size_t> root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = i;
    auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (const auto& e : tree.edges) {
        const auto a = find(e.a);
        const auto b = find(e.b);
        if (a == b) return false;
        root[a] = b;
    }
    return true;
}

bool has_running_intersection(const ClusterTree& tree) {
    if (!is_tree(tree)) return false;
    for (const auto& e : tree.edges) {
        if (e.separator != intersect(tree.clusters[e.a], tree.clusters[e.b])) return false;
    }
    std::set<VarId> vars;
    for (const auto& c : tree.clusters) vars.insert(c.begin(), c.end());
    for (VarId v : vars) {
        // The clusters holding v, joined by edges whose separator holds v,
        // must form one connected piece.
        std::vector<std::size_t> holders;
        for (std::size_t c = 0; c < tree.size(); ++c) {
            if (std::binary_search(tree.clusters[c].begin(), tree.clusters[c].end(), v)) holders.push_back(c);
        }
        std::set<std::size_t> seen{holders.front()};
        std::vector<std::size_t> stack{holders.front()};
        while (!stack.empty()) {
            const auto c = stack.back();
            stack.pop_back();
            for (const auto& e : tree.edges) {
                if (!std::binary_search(e.separator.begin(), e.separator.end(), v)) continue;
                const std::size_t other = e.a == c ? e.b : (e.b == c ? e.a : ClusterTree::npos);
                if (other != ClusterTree::npos && seen.insert(other).second) stack.push_back(other);
            }
        }
        if (seen.size() != holders.size()) return false;
    }
    return true;
}

std::string to_dot(const ClusterTree& tree, const std::function<std::string(VarId)>& name) {
    std::ostringstream os;
    os << "graph clusters {\n";
    for (std::size_t c = 0; c < tree.size(); ++c) {
        os << "  c" << c << " [label=\"";
        for (std::size_t k = 0; k < tree.clusters[c].size(); ++k) os << (k ? " " : "") << name(tree.clusters[c][k]);
        os << "\"];\n";
    }
    for (const auto& e : tree.edges) {
        os << "  c" << e.a << " -- c" << e.b << " [label=\"";
        for (std::size_t k = 0; k < e.separator.size(); ++k) os << (k ? " " : "") << name(e.separator[k]);
        os << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace idsolve
