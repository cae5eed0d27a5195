#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idsolve/inference.hpp"
#include "idsolve/policy.hpp"
#include "idsolve/transform.hpp"

namespace idsolve {

struct ClusterOptions {
    /// rescaled_utility, valuation, or likelihood (value tables as likelihoods).
    Encoding mode = Encoding::rescaled_utility;
    TransformOptions transform;
    EvidenceMode evidence_mode = EvidenceMode::indicator;
};

/// Policy of `decision` from a cluster potential: sum out everything except
/// the decision and `relevant` (slicing at Value=1 first when `value_var` is
/// in scope) and take the argmax. Rows over `relevant` in the given order.
/// Throws NEGATIVE_WEIGHT when the Value=0 slice is negative.
ExtractedRule decision_from_cluster(const Factor& potential, VarId decision, const std::vector<VarId>& relevant,
                                    std::optional<VarId> value_var = std::nullopt);

/// Collects to each decision's cluster in reverse decision order, extracting
/// the policy and multiplying it into that cluster's potential.
EvaluationResult solve_by_clustering(const InfluenceDiagram& diagram, const ClusterOptions& options = {});

// --- rooted one-directional trees -------------------------------------------

/// Cluster tree with every edge directed toward a unique root whose scope is
/// {Value}. `child[c]` is the cluster c sends to (npos for the root).
struct RootedClusterTree {
    ClusterTree tree;
    std::size_t root = ClusterTree::npos;
    std::vector<std::size_t> child;
    /// Variables dropped on the way to the child: decisions first.
    std::vector<std::vector<VarId>> drops;
    /// Cluster formed when each decision (by decision index) was eliminated.
    std::vector<std::size_t> decision_cluster;
    /// Tables (chance CPTs, Value table) and the cluster each went to.
    std::vector<Factor> tables;
    std::vector<std::size_t> table_cluster;
    std::vector<VarId> decisions;
    std::vector<std::vector<VarId>> decision_scopes;
    std::vector<std::vector<VarId>> information_sets;
    VarId value_var = 0;
    Assignment evidence;
    bool value_everywhere = false;
    /// Arcs between consecutive decisions added to keep decision clusters on
    /// one path.
    std::size_t repairs = 0;
};

struct OneDirectionalOptions {
    /// Value in the elimination graph (and hence in most clusters) instead
    /// of only on the path from the value attributes to the root.
    bool value_everywhere = false;
};

/// Eliminates variables in reverse temporal order (unobserved chance
/// variables, then D^m, the variables D^m is first to use, D^{m-1}, ...) with
/// min-fill inside each group. Requires a network with a Value variable.
/// Throws ONE_DIRECTIONAL_CHECK_FAILED if the result violates a condition.
RootedClusterTree build_one_directional_tree(const Network& net, const OneDirectionalOptions& options = {});

/// Human-readable list of violated conditions; empty when the tree is rooted
/// and one-directional.
std::vector<std::string> check_one_directional(const RootedClusterTree& tree);

struct SinglePassTrace {
    /// Per decision index: the potential at the decision cluster just before
    /// the decision was maximized out.
    std::vector<Factor> partial;
    /// Per decision index: scope of the extracted rule (network indices) and
    /// its rows.
    std::vector<std::vector<VarId>> rule_scope;
    std::vector<ExtractedRule> rules;
    std::size_t messages = 0;
};

/// One message per edge toward the root; decisions are maximized (at the
/// Value=1 slice) before chance variables are summed. At the root MEV is
/// Psi(V=1)/Psi(V=0), unscaled when the network's Value table holds utilities.
EvaluationResult single_pass_solve(const RootedClusterTree& tree, const Network& net,
                                   const InfluenceDiagram& original, SinglePassTrace* trace = nullptr);

struct OneDirectionalRun {
    Network net;
    RootedClusterTree tree;
    SinglePassTrace trace;
    EvaluationResult result;
};

struct SinglePassOptions {
    /// valuation, or rescaled_utility (Value table holds u(a) in [0,1]).
    Encoding mode = Encoding::valuation;
    TransformOptions transform;
    OneDirectionalOptions tree;
};

OneDirectionalRun run_one_directional(const InfluenceDiagram& diagram, const SinglePassOptions& options = {});
EvaluationResult solve_one_directional(const InfluenceDiagram& diagram, const SinglePassOptions& options = {});

/// For each decision index, the potential at its cluster after a full
/// sum-collect on the same tree, with the later decisions' traced rules
/// installed as indicator tables.
std::vector<Factor> full_collect_potentials(const RootedClusterTree& tree, const Network& net,
                                            const SinglePassTrace& trace);

struct SinglePassCheck {
    bool ok = true;
    std::size_t rows_compared = 0;
    std::string detail;
};

/// Message count equals the edge count, and every decision's partial-collect
/// argmax equals the full-collect argmax on rows of positive probability.
SinglePassCheck verify_single_pass(const RootedClusterTree& tree, const Network& net, const SinglePassTrace& trace);

std::string to_dot(const RootedClusterTree& tree, const Network& net);

}  // namespace idsolve
