#pragma once

#include <cstddef>
#include <vector>

#include "idsolve/model.hpp"
#include "idsolve/policy.hpp"

namespace idsolve {

struct ExpectedValue {
    double ev = 0.0;
    double evidence_probability = 1.0;
};

/// E{v | policy, E=e} by enumerating every configuration of the diagram.
/// A rule may observe only parents of its decision.
/// Throws ZERO_EVIDENCE_PROBABILITY, INVALID_ARGUMENT for a malformed policy.
ExpectedValue expected_value(const InfluenceDiagram& diagram, const Policy& policy);

enum class ScopeMode { relevant, full_information };

struct OracleResult {
    /// Every deterministic policy within 1e-9 * max(1, |mev|) of the best.
    std::vector<Policy> optimal;
    double mev = 0.0;
    double evidence_probability = 1.0;
    std::size_t evaluated = 0;
};

/// Exhaustive search over tuples of deterministic rules, each over R^i
/// (relevant) or I^i (full_information). Rows a rule can never reach because
/// they contradict an earlier rule it observes are pinned to alternative 0.
/// Throws POLICY_SPACE_TOO_LARGE above `limit` policies.
OracleResult brute_solve(const InfluenceDiagram& diagram, ScopeMode mode = ScopeMode::relevant,
                         std::size_t limit = 1'000'000);

}  // namespace idsolve
