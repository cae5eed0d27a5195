#pragma once

#include <optional>
#include <string_view>

#include "idsolve/cluster_decision.hpp"
#include "idsolve/oracle.hpp"
#include "idsolve/queries.hpp"

namespace idsolve {

enum class Method { queries, cluster, onedir, oracle };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);
std::optional<Encoding> parse_encoding(std::string_view s);

struct SolveOptions {
    Method method = Method::onedir;
    /// Unset picks the backend's natural encoding: rescaled for queries and
    /// cluster, valuation for onedir. Ignored by the oracle.
    std::optional<Encoding> mode;
    TransformOptions transform;
    EvidenceMode evidence_mode = EvidenceMode::indicator;
    OneDirectionalOptions tree;
    ScopeMode oracle_scope = ScopeMode::relevant;
};

/// Runs one backend. A mode the backend does not support throws
/// INVALID_ARGUMENT.
EvaluationResult solve(const InfluenceDiagram& diagram, const SolveOptions& options = {});

}  // namespace idsolve
