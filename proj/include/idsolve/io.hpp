#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "idsolve/model.hpp"
#include "idsolve/policy.hpp"

namespace idsolve {

/// Model documents are JSON objects:
///
///   variables       [{id, kind: chance|decision|value, outcomes, name?}]
///   arcs            [[parent, child], ...]
///   cpts            [{variable, parents, probabilities}]   row-major, parents
///                                                          in the given order
///   values          {combination: none|sum|product,
///                    tables: [{variable, attributes, values}]}
///   decision_order  [id, ...]
///   evidence        {id: outcome, ...}
///
/// Malformed JSON or fields throw PARSE_ERROR; semantic problems are left to
/// validate().
InfluenceDiagram parse_model(std::string_view text);
InfluenceDiagram load_model(const std::filesystem::path& path);
std::string dump_model(const InfluenceDiagram& diagram);

/// Solution document: mev, meu (when defined), evidence_probability, and
/// policy: [{decision, scope, choices}] with one alternative label per scope
/// configuration, row-major.
std::string dump_solution(const InfluenceDiagram& diagram, const EvaluationResult& result);

/// Reads the `policy` array of a solution document against `diagram`.
Policy parse_policy(std::string_view text, const InfluenceDiagram& diagram);
Policy load_policy(const std::filesystem::path& path, const InfluenceDiagram& diagram);

/// Text read in full; throws PARSE_ERROR when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace idsolve
