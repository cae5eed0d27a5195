#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idsolve/error.hpp"
#include "idsolve/factor.hpp"

namespace idsolve {

enum class VarKind { chance, decision, value };

std::string_view to_string(VarKind kind);

struct Variable {
    std::string id;
    std::string name;
    VarKind kind = VarKind::chance;
    /// Outcome labels (alternatives for decisions); empty for value nodes.
    std::vector<std::string> outcomes;

    [[nodiscard]] std::size_t cardinality() const noexcept { return outcomes.size(); }
};

/// How several value nodes combine into the total value.
enum class Combination { none, sum, product };

std::string_view to_string(Combination c);

/// A single decision maker's problem: chance, decision and value nodes over a
/// DAG, with conditional tables, value functions, a decision order and
/// observed evidence.
///
/// Table layout: a CPT is a Factor over (parents..., variable) in the order the
/// parents were given to set_cpt; a value function is a Factor over its
/// attributes in the order given to set_value_table.
class InfluenceDiagram {
public:
    VarId add_chance(std::string id, std::vector<std::string> outcomes, std::string name = {});
    VarId add_decision(std::string id, std::vector<std::string> alternatives, std::string name = {});
    VarId add_value(std::string id, std::string name = {});

    void add_arc(VarId parent, VarId child);
    void add_arc(const std::string& parent, const std::string& child);

    void set_cpt(VarId var, const std::vector<VarId>& parent_order, std::vector<double> probabilities);
    void set_value_table(VarId var, const std::vector<VarId>& attributes, std::vector<double> values);
    void set_combination(Combination c) { combination_ = c; }
    void set_decision_order(std::vector<VarId> order) { decision_order_ = std::move(order); }
    void set_evidence(VarId var, std::size_t outcome);
    void clear_evidence(VarId var) { evidence_.erase(var); }

    [[nodiscard]] const std::vector<Variable>& variables() const noexcept { return variables_; }
    [[nodiscard]] const Variable& variable(VarId v) const;
    [[nodiscard]] std::size_t size() const noexcept { return variables_.size(); }
    [[nodiscard]] std::optional<VarId> find(const std::string& id) const;
    /// Throws UNKNOWN_VARIABLE.
    [[nodiscard]] VarId index_of(const std::string& id) const;

    [[nodiscard]] const std::vector<std::pair<VarId, VarId>>& arcs() const noexcept { return arcs_; }
    /// Parents in arc insertion order.
    [[nodiscard]] std::vector<VarId> parents(VarId v) const;
    [[nodiscard]] std::vector<VarId> children(VarId v) const;

    [[nodiscard]] const Factor* cpt(VarId v) const;
    [[nodiscard]] const Factor* value_table(VarId v) const;
    [[nodiscard]] const std::map<VarId, Factor>& cpts() const noexcept { return cpts_; }
    [[nodiscard]] const std::map<VarId, Factor>& value_tables() const noexcept { return value_tables_; }

    [[nodiscard]] std::vector<VarId> nodes_of_kind(VarKind kind) const;
    [[nodiscard]] std::vector<VarId> value_nodes() const { return nodes_of_kind(VarKind::value); }
    [[nodiscard]] Combination combination() const noexcept { return combination_; }
    [[nodiscard]] const std::vector<VarId>& decision_order() const noexcept { return decision_order_; }
    [[nodiscard]] const Assignment& evidence() const noexcept { return evidence_; }
    [[nodiscard]] bool is_evidence(VarId v) const { return evidence_.contains(v); }

    /// Copy keeping only the variables in `keep` (renumbered in original
    /// order). Arcs, tables, decisions and evidence touching dropped variables
    /// are dropped with them.
    [[nodiscard]] InfluenceDiagram subset(const std::set<VarId>& keep) const;

private:
    VarId add_variable(Variable v);
    void check(VarId v) const;

    std::vector<Variable> variables_;
    std::map<std::string, VarId> index_;
    std::vector<std::pair<VarId, VarId>> arcs_;
    std::map<VarId, Factor> cpts_;
    std::map<VarId, Factor> value_tables_;
    Combination combination_ = Combination::none;
    std::vector<VarId> decision_order_;
    Assignment evidence_;
};

struct Issue {
    ErrorCode code;
    std::string message;
    std::vector<std::string> ids;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
    [[nodiscard]] bool has(ErrorCode code) const;
};

ValidationReport validate(const InfluenceDiagram& diagram);

/// Throws VALIDATION_FAILED naming every error code when the report is not ok.
void require_valid(const InfluenceDiagram& diagram);

/// Adds the missing memory arcs: every earlier decision and each of its
/// parents becomes a parent of every later decision.
InfluenceDiagram complete_no_forgetting(const InfluenceDiagram& diagram);

/// Variables in a topological order (ties by lowest index); nullopt on a cycle.
std::optional<std::vector<VarId>> topological_order(const InfluenceDiagram& diagram);

/// Parent/child adjacency of a DAG over variable indices.
struct Dag {
    std::vector<std::vector<VarId>> parents;
    std::vector<std::vector<VarId>> children;

    explicit Dag(std::size_t n = 0) : parents(n), children(n) {}
    [[nodiscard]] std::size_t size() const noexcept { return parents.size(); }
    void add_arc(VarId from, VarId to);
    void remove_incoming(VarId v);
};

Dag dag_of(const InfluenceDiagram& diagram);

/// Every node with an active trail to some source given `given` (sources
/// included unless they are themselves given).
std::set<VarId> d_connected(const Dag& dag, const std::set<VarId>& sources, const std::set<VarId>& given);

bool d_separated(const Dag& dag, const std::set<VarId>& x, const std::set<VarId>& y, const std::set<VarId>& given);

/// d-separation on the diagram's DAG; value nodes are ordinary sinks.
bool d_separated(const InfluenceDiagram& diagram, VarId x, VarId y, const std::set<VarId>& given);

/// Non-evidence parents of a decision (its information set I).
std::vector<VarId> information_set(const InfluenceDiagram& diagram, VarId decision);

struct Relevance {
    VarId decision;
    /// Value nodes the decision can influence given what it observes (every
    /// value node of a product once any is influenced).
    std::vector<VarId> values;
    /// Subset of the information set needed to choose optimally.
    std::vector<VarId> relevant;
};

/// Relevance for every decision, in decision order. Later decisions enter the
/// graph as policy nodes over their own relevant sets; the current and earlier
/// decisions have no incoming arcs.
std::vector<Relevance> relevance_analysis(const InfluenceDiagram& diagram);

/// Relevant information of one decision; throws NOT_A_DECISION.
std::vector<VarId> relevant_information(const InfluenceDiagram& diagram, VarId decision);

struct PruneOptions {
    bool remove_barren = true;
    bool remove_d_separated = true;
};

struct PruneResult {
    InfluenceDiagram diagram;
    std::vector<std::string> removed;
    /// Probability of the evidence detached from the retained part; multiply
    /// it into the retained network's evidence probability.
    double evidence_factor = 1.0;
};

/// Removes barren nodes and chance nodes d-separated from every target given
/// the evidence. Posteriors of retained variables given the evidence, and
/// hence every expected value, are unchanged.
PruneResult prune(const InfluenceDiagram& diagram, const std::set<VarId>& targets, PruneOptions options = {});

}  // namespace idsolve
