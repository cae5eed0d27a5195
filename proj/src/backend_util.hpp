#pragma once

#include <string>
#include <vector>

#include "idsolve/inference.hpp"
#include "idsolve/policy.hpp"
#include "idsolve/transform.hpp"

namespace idsolve::detail {

/// {D} U scope for every decision of the network.
std::vector<std::vector<VarId>> decision_families(const Network& net);

/// Deterministic CPT over (scope..., D) choosing `choice[r]` in row r.
Factor deterministic_table(const Network& net, std::size_t i, const std::vector<std::size_t>& choice);

/// Rules for every decision of `original` in its decision order; decisions the
/// solver never saw (pruned) get the trivial rule.
Policy assemble_policy(const InfluenceDiagram& original, const std::vector<DecisionRule>& solved);

/// Result for a constant value table: alternative 0 everywhere, MEV = v_min.
EvaluationResult degenerate_result(const InfluenceDiagram& diagram, const TransformOptions& options,
                                   const std::string& backend);

/// `f` summed down to `keep`, axes in `keep` order.
Factor project(const Factor& f, const std::vector<VarId>& keep);

}  // namespace idsolve::detail
