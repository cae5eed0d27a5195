#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idsolve/factor.hpp"
#include "idsolve/model.hpp"

namespace idsolve {

/// How the value criterion appears in a converted network.
enum class Encoding {
    /// Binary Utility node with P{U=1|a} = (v(a) - v_min) / (v_max - v_min).
    rescaled_utility,
    /// Binary Value node with V{V=1|a} = v(a) and V{V=0|a} = 1.
    valuation,
    /// No value variable; each value table is a likelihood factor over its attributes.
    likelihood,
};

std::string_view to_string(Encoding e);

struct ValueScale {
    double v_min = 0.0;
    double v_max = 1.0;

    [[nodiscard]] double rescale(double v) const { return (v - v_min) / (v_max - v_min); }
    [[nodiscard]] double unscale(double u) const { return v_min + (v_max - v_min) * u; }
};

struct TransformOptions {
    bool prune = true;
    /// Decisions keep every informational parent instead of only the relevant ones.
    bool full_information = false;
};

/// A diagram converted for inference. Variable indices are those of the
/// (merged, pruned) diagram; the value node keeps its slot and becomes a
/// binary variable in the utility and valuation encodings.
struct Network {
    std::vector<Variable> variables;
    /// Chance CPTs over (parents..., var), decision tables (uniform) over
    /// (scope..., decision), and the Utility/Value table over (attributes..., var).
    std::map<VarId, Factor> tables;
    /// Likelihood encoding only: the value factors.
    std::vector<Factor> value_factors;
    std::vector<VarId> decisions;
    std::vector<std::vector<VarId>> decision_scopes;
    /// Non-evidence parents of each decision in the pruned diagram.
    std::vector<std::vector<VarId>> information_sets;
    std::optional<VarId> value_var;
    std::vector<VarId> value_attributes;
    Encoding encoding = Encoding::valuation;
    /// Set in the rescaled encoding.
    std::optional<ValueScale> scale;
    /// Smallest and largest entry of the (merged) value table.
    ValueScale range;
    Assignment evidence;
    /// Probability of the evidence that pruning detached from the network.
    double evidence_factor = 1.0;
    std::vector<std::string> removed;

    [[nodiscard]] std::size_t size() const noexcept { return variables.size(); }
    [[nodiscard]] std::vector<std::size_t> cardinalities() const;
    [[nodiscard]] bool is_decision(VarId v) const;
    /// Position of `d` in `decisions`; throws NOT_A_DECISION.
    [[nodiscard]] std::size_t decision_index(VarId d) const;
    /// Every table except the decision tables, then the value factors.
    [[nodiscard]] std::vector<Factor> chance_tables() const;
};

/// Single value node whose table is the sum (or product) of the local tables
/// broadcast over the union of their attributes. Diagrams with one value node
/// are returned unchanged. Throws NEGATIVE_FACTOR for a product with a
/// negative entry.
InfluenceDiagram merge_values(const InfluenceDiagram& diagram);

/// Throws DEGENERATE_VALUE when the value table is constant.
Network to_belief_network(const InfluenceDiagram& diagram, TransformOptions options = {});
Network to_valuation_network(const InfluenceDiagram& diagram, TransformOptions options = {});
/// Keeps product-combined local values as separate likelihood factors.
Network to_likelihood_network(const InfluenceDiagram& diagram, TransformOptions options = {});

}  // namespace idsolve
