#pragma once

#include <string>
#include <vector>

#include "idsolve/solve.hpp"

namespace idsolve {

/// Local value nodes and, per decision, the ones it can influence (W^i).
struct SeparableValueModel {
    std::vector<std::string> values;
    Combination combination = Combination::none;
    std::vector<std::string> decisions;
    std::vector<std::vector<std::string>> dependent_values;
};

SeparableValueModel separable_structure(const InfluenceDiagram& diagram);

/// Product of nonnegative local values: each factor stays a separate
/// likelihood table in the cluster tree. Throws NEGATIVE_FACTOR.
EvaluationResult solve_product_decomposition(const InfluenceDiagram& diagram, const TransformOptions& transform = {});

/// Sum of local values: merges them into one value node, then runs the
/// chosen backend. A note records the merged scope and its table size.
EvaluationResult solve_additive_decomposition(const InfluenceDiagram& diagram, const SolveOptions& options = {});

}  // namespace idsolve
