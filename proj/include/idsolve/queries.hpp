#pragma once

#include "idsolve/inference.hpp"
#include "idsolve/policy.hpp"
#include "idsolve/transform.hpp"

namespace idsolve {

struct QueryOptions {
    TransformOptions transform;
    EvidenceMode evidence_mode = EvidenceMode::indicator;
};

/// Backward posterior queries on the belief network: for the last decision
/// first, the joint of the decision and its relevant information given U=1,
/// the evidence and every later installed policy; its argmax becomes a
/// deterministic CPT. Throws ZERO_EVIDENCE_PROBABILITY.
EvaluationResult solve_by_queries(const InfluenceDiagram& diagram, const QueryOptions& options = {});

}  // namespace idsolve
