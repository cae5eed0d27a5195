#include "idsolve/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idsolve {

namespace {

constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();

struct Table {
    std::vector<VarId> scope;
    std::vector<std::size_t> strides;
    const std::vector<double>* values = nullptr;

    explicit Table(const Factor& f) : scope(f.scope()), strides(f.scope().size()), values(&f.values()) {
        std::size_t s = 1;
        for (std::size_t k = scope.size(); k-- > 0;) {
            strides[k] = s;
            s *= f.cardinalities()[k];
        }
    }

    double at(const std::vector<std::size_t>& config) const {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < scope.size(); ++k) flat += config[scope[k]] * strides[k];
        return (*values)[flat];
    }
};

struct Rule {
    std::vector<VarId> scope;
    std::vector<std::size_t> strides;
    const std::vector<std::size_t>* choice = nullptr;
};

/// Joint enumeration with rules swappable between runs.
class Evaluator {
public:
    explicit Evaluator(const InfluenceDiagram& d) : d_(d), config_(d.size(), unset), rules_(d.size()) {
        require_valid(d);
        const auto topo = topological_order(d);
        for (VarId v : *topo) {
            if (d.variable(v).kind != VarKind::value) order_.push_back(v);
        }
        for (const auto& [v, f] : d.cpts()) cpts_.emplace(v, Table(f));
        for (VarId v : d.value_nodes()) values_.emplace_back(*d.value_table(v));
        for (const auto& [v, o] : d.evidence()) config_[v] = o;
    }

    /// Scope given as variable indices; `choice` must outlive evaluation.
    void set_rule(VarId decision, std::vector<VarId> scope, const std::vector<std::size_t>* choice) {
        Rule r;
        r.strides.resize(scope.size());
        std::size_t s = 1;
        for (std::size_t k = scope.size(); k-- > 0;) {
            r.strides[k] = s;
            s *= d_.variable(scope[k]).cardinality();
        }
        if (choice->size() != s) {
            throw Error(ErrorCode::invalid_argument, "rule for " + d_.variable(decision).id + " has " +
                                                         std::to_string(choice->size()) + " rows, expected " +
                                                         std::to_string(s));
        }
        const std::size_t n = d_.variable(decision).cardinality();
        for (std::size_t c : *choice) {
            if (c >= n) throw Error(ErrorCode::index_out_of_range, "rule for " + d_.variable(decision).id + " picks a missing alternative");
        }
        r.scope = std::move(scope);
        r.choice = choice;
        rules_[decision] = std::move(r);
    }

    /// Checks every rule reads only variables fixed before its decision.
    void check_observable() const {
        std::vector<bool> fixed(d_.size(), false);
        for (const auto& [v, o] : d_.evidence()) fixed[v] = true;
        for (VarId v : order_) {
            if (d_.variable(v).kind == VarKind::decision) {
                if (rules_[v].choice == nullptr) {
                    throw Error(ErrorCode::invalid_argument, "policy has no rule for " + d_.variable(v).id);
                }
                const auto parents = d_.parents(v);
                for (VarId s : rules_[v].scope) {
                    if (!fixed[s] || std::find(parents.begin(), parents.end(), s) == parents.end()) {
                        throw Error(ErrorCode::invalid_argument,
                                    d_.variable(v).id + " cannot observe " + d_.variable(s).id);
                    }
                }
            }
            fixed[v] = true;
        }
    }

    ExpectedValue run() {
        mass_ = 0.0;
        weighted_ = 0.0;
        visit(0, 1.0);
        if (!(mass_ > 0.0)) throw Error(ErrorCode::zero_evidence_probability, "the evidence has probability zero");
        return {weighted_ / mass_, mass_};
    }

private:
    void visit(std::size_t pos, double w) {
        if (pos == order_.size()) {
            mass_ += w;
            weighted_ += w * value();
            return;
        }
        const VarId v = order_[pos];
        const Variable& var = d_.variable(v);
        if (var.kind == VarKind::decision) {
            const Rule& r = rules_[v];
            std::size_t flat = 0;
            for (std::size_t k = 0; k < r.scope.size(); ++k) flat += config_[r.scope[k]] * r.strides[k];
            config_[v] = (*r.choice)[flat];
            visit(pos + 1, w);
            config_[v] = unset;
            return;
        }
        const Table& cpt = cpts_.at(v);
        if (d_.is_evidence(v)) {
            const double p = cpt.at(config_);
            if (p > 0.0) visit(pos + 1, w * p);
            return;
        }
        for (std::size_t o = 0; o < var.cardinality(); ++o) {
            config_[v] = o;
            const double p = cpt.at(config_);
            if (p > 0.0) visit(pos + 1, w * p);
        }
        config_[v] = unset;
    }

    double value() const {
        const bool prod = d_.combination() == Combination::product;
        double acc = prod ? 1.0 : 0.0;
        for (const auto& t : values_) acc = prod ? acc * t.at(config_) : acc + t.at(config_);
        return acc;
    }

    const InfluenceDiagram& d_;
    std::vector<VarId> order_;
    std::map<VarId, Table> cpts_;
    std::vector<Table> values_;
    std::vector<std::size_t> config_;
    std::vector<Rule> rules_;
    double mass_ = 0.0;
    double weighted_ = 0.0;
};

}  // namespace

ExpectedValue expected_value(const InfluenceDiagram& diagram, const Policy& policy) {
    Evaluator eval(diagram);
    for (VarId d : diagram.decision_order()) {
        const DecisionRule* r = policy.find(diagram.variable(d).id);
        if (r == nullptr) throw Error(ErrorCode::invalid_argument, "policy has no rule for " + diagram.variable(d).id);
        std::vector<VarId> scope;
        for (const auto& id : r->scope) scope.push_back(diagram.index_of(id));
        eval.set_rule(d, std::move(scope), &r->choice);
    }
    eval.check_observable();
    return eval.run();
}

namespace {

struct Slot {
    VarId decision;
    std::vector<VarId> scope;
    std::vector<std::size_t> cards;
    std::size_t alternatives = 0;
    /// Earlier decisions this rule observes whose own scope it also observes.
    std::vector<std::size_t> pinned_by;
    std::vector<std::size_t> choice;
};

class Search {
public:
    Search(const InfluenceDiagram& d, std::vector<Slot> slots) : eval_(d), slots_(std::move(slots)) {
        for (auto& s : slots_) {
            s.choice.assign(ConfigCounter::count(s.cards), 0);
            eval_.set_rule(s.decision, s.scope, &s.choice);
        }
        eval_.check_observable();
    }

    void run(std::size_t k) {
        if (k == slots_.size()) {
            ++evaluated_;
            const ExpectedValue ev = eval_.run();
            pe_ = ev.evidence_probability;
            if (ev.ev > best_) best_ = ev.ev;
            if (ev.ev >= best_ - tolerance(best_)) {
                std::vector<std::vector<std::size_t>> tuple;
                for (const auto& s : slots_) tuple.push_back(s.choice);
                candidates_.emplace_back(ev.ev, std::move(tuple));
            }
            return;
        }
        Slot& s = slots_[k];
        // Rows reachable under the earlier rules are free; the rest stay 0.
        std::vector<std::size_t> free;
        std::size_t row = 0;
        for (ConfigCounter c(s.cards); !c.done(); c.next(), ++row) {
            bool reachable = true;
            for (std::size_t j : s.pinned_by) {
                const Slot& e = slots_[j];
                std::vector<std::size_t> sub;
                for (VarId v : e.scope) {
                    sub.push_back(c.digits()[index_in(s.scope, v)]);
                }
                std::size_t flat = 0;
                for (std::size_t q = 0; q < sub.size(); ++q) flat = flat * e.cards[q] + sub[q];
                if (c.digits()[index_in(s.scope, e.decision)] != e.choice[flat]) reachable = false;
            }
            s.choice[row] = 0;
            if (reachable) free.push_back(row);
        }
        enumerate(k, s, free, 0);
    }

    static double tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

    Evaluator eval_;
    std::vector<Slot> slots_;
    std::size_t evaluated_ = 0;
    double best_ = -std::numeric_limits<double>::infinity();
    double pe_ = 0.0;
    std::vector<std::pair<double, std::vector<std::vector<std::size_t>>>> candidates_;

private:
    static std::size_t index_in(const std::vector<VarId>& scope, VarId v) {
        return static_cast<std::size_t>(std::find(scope.begin(), scope.end(), v) - scope.begin());
    }

    void enumerate(std::size_t k, Slot& s, const std::vector<std::size_t>& free, std::size_t pos) {
        if (pos == free.size()) {
            run(k + 1);
            return;
        }
        for (std::size_t a = 0; a < s.alternatives; ++a) {
            s.choice[free[pos]] = a;
            enumerate(k, s, free, pos + 1);
        }
        s.choice[free[pos]] = 0;
    }
};

}  // namespace

OracleResult brute_solve(const InfluenceDiagram& diagram, ScopeMode mode, std::size_t limit) {
    require_valid(diagram);
    const auto& order = diagram.decision_order();
    std::vector<std::vector<VarId>> scopes;
    if (mode == ScopeMode::relevant) {
        for (const auto& r : relevance_analysis(diagram)) scopes.push_back(r.relevant);
    } else {
        for (VarId d : order) scopes.push_back(information_set(diagram, d));
    }
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < order.size(); ++i) {
        Slot s;
        s.decision = order[i];
        s.scope = scopes[i];
        for (VarId v : s.scope) s.cards.push_back(diagram.variable(v).cardinality());
        s.alternatives = diagram.variable(order[i]).cardinality();
        for (std::size_t j = 0; j < i; ++j) {
            const auto& sc = s.scope;
            const bool sees_decision = std::find(sc.begin(), sc.end(), order[j]) != sc.end();
            const bool sees_inputs = std::all_of(scopes[j].begin(), scopes[j].end(), [&](VarId v) {
                return std::find(sc.begin(), sc.end(), v) != sc.end();
            });
            if (sees_decision && sees_inputs) s.pinned_by.push_back(j);
        }
        slots.push_back(std::move(s));
    }

    // Each pinned earlier decision leaves one matching alternative per row.
    double log_space = 0.0;
    for (const auto& s : slots) {
        double rows = static_cast<double>(ConfigCounter::count(s.cards));
        for (std::size_t j : s.pinned_by) rows /= static_cast<double>(slots[j].alternatives);
        log_space += rows * std::log(static_cast<double>(s.alternatives));
    }
    if (log_space > std::log(static_cast<double>(limit)) + 1e-9) {
        throw Error(ErrorCode::policy_space_too_large,
                    "policy space exceeds " + std::to_string(limit) + " deterministic policies");
    }

    Search search(diagram, std::move(slots));
    search.run(0);

    OracleResult out;
    out.mev = search.best_;
    out.evidence_probability = search.pe_;
    out.evaluated = search.evaluated_;
    for (const auto& [ev, tuple] : search.candidates_) {
        if (ev < search.best_ - Search::tolerance(search.best_)) continue;
        Policy p;
        for (std::size_t i = 0; i < order.size(); ++i) {
            DecisionRule r;
            r.decision = diagram.variable(order[i]).id;
            for (VarId v : search.slots_[i].scope) {
                r.scope.push_back(diagram.variable(v).id);
                r.scope_cards.push_back(diagram.variable(v).cardinality());
            }
            r.choice = tuple[i];
            p.rules.push_back(std::move(r));
        }
        out.optimal.push_back(std::move(p));
    }
    return out;
}

}  // namespace idsolve
