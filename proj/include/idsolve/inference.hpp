#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "idsolve/factor.hpp"
#include "idsolve/transform.hpp"

namespace idsolve {

struct ClusterEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<VarId> separator;
};

/// Join tree over variable indices. Clusters are kept sorted.
struct ClusterTree {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::vector<std::vector<VarId>> clusters;
    std::vector<ClusterEdge> edges;
    /// Cardinality per variable index (covers every index any cluster uses).
    std::vector<std::size_t> cards;
    /// Indices into the table list given to initialize_potentials, per cluster.
    std::vector<std::vector<std::size_t>> assigned;
    std::vector<Factor> potentials;

    [[nodiscard]] std::size_t size() const noexcept { return clusters.size(); }
    [[nodiscard]] std::vector<std::size_t> neighbors(std::size_t c) const;
    [[nodiscard]] bool covers(std::size_t c, std::span<const VarId> scope) const;
    /// Smallest cluster containing `scope`, ties by lowest index; npos if none.
    [[nodiscard]] std::size_t smallest_covering(std::span<const VarId> scope) const;
    [[nodiscard]] std::size_t largest_cluster() const;
};

struct TriangulationOptions {
    /// When non-empty, variables are eliminated group by group (min-fill inside
    /// each group); variables in no group go last.
    std::vector<std::vector<VarId>> groups;
};

/// Variable elimination on the moral graph of `families` plus `constraints`.
struct Elimination {
    std::vector<VarId> order;
    /// Sorted clique {v} U neighbours(v) formed when order[k] was eliminated.
    std::vector<std::vector<VarId>> cliques;
    /// Step at which each variable was eliminated (npos for absent variables).
    std::vector<std::size_t> step;
};

Elimination eliminate(std::span<const std::vector<VarId>> families, std::span<const std::vector<VarId>> constraints,
                      std::size_t num_vars, const TriangulationOptions& options = {});

/// Moralized families plus clique constraints, triangulated by min-fill
/// (ties by lowest variable index), joined into a tree of maximal cliques.
/// Only variables that occur in some family or constraint get clusters.
ClusterTree build_cluster_tree(std::span<const std::vector<VarId>> families, std::vector<std::size_t> cards,
                               std::span<const std::vector<VarId>> constraints = {},
                               const TriangulationOptions& options = {});

/// Tree over every table of the network (decision tables included) with one
/// constraint per extra variable set.
ClusterTree build_cluster_tree(const Network& net, std::span<const std::vector<VarId>> constraints = {});

/// Tree with explicitly given clusters and edges (pairs of cluster indices).
ClusterTree make_cluster_tree(std::vector<std::vector<VarId>> clusters,
                              const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                              std::vector<std::size_t> cards);

enum class EvidenceMode {
    /// Observed variables stay in every table; an indicator factor zeroes
    /// the unobserved outcomes.
    indicator,
    /// Tables are sliced at the observation and observed variables vanish.
    reduce,
};

/// Assigns every table to the smallest covering cluster and multiplies it in.
/// Throws UNCOVERED_TABLE.
void initialize_potentials(ClusterTree& tree, std::span<const Factor> tables, const Assignment& evidence = {},
                           EvidenceMode mode = EvidenceMode::indicator);

/// Same, with the cluster of each table chosen by `place`.
void initialize_potentials(ClusterTree& tree, std::span<const Factor> tables, const Assignment& evidence,
                           EvidenceMode mode, const std::function<std::size_t(std::span<const VarId>)>& place);

struct CollectResult {
    Factor potential;
    std::size_t messages = 0;
};

/// Sends one message along every edge toward `target` and returns its
/// potential times the incoming messages: the joint of the target's
/// variables with the evidence.
CollectResult collect(const ClusterTree& tree, std::size_t target);

struct MarginalResult {
    Factor posterior;
    double evidence_probability = 0.0;
};

/// Posterior of `query` (which some cluster must contain) given the evidence
/// already multiplied into the potentials. Throws ZERO_EVIDENCE_PROBABILITY,
/// or INVALID_ARGUMENT when no cluster contains the query.
MarginalResult marginal(const ClusterTree& tree, std::span<const VarId> query);

/// Every edge separator equals the intersection of its endpoints, the edges
/// form a spanning tree and every variable's clusters are connected.
bool has_running_intersection(const ClusterTree& tree);
bool is_tree(const ClusterTree& tree);

/// P{E=e} of a network: its chance and (uniform) decision tables collected
/// under the evidence, times the detached evidence factor.
double evidence_probability(const Network& net);

std::string to_dot(const ClusterTree& tree, const std::function<std::string(VarId)>& name);

}  // namespace idsolve
