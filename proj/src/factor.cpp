#include "idsolve/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "idsolve/error.hpp"

namespace idsolve {

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * cards[i];
    }
    return strides;
}

/// Strides of `f` expressed along the axes of `target_scope` (0 when absent).
std::vector<std::size_t> strides_along(const Factor& f, const std::vector<VarId>& target_scope) {
    const auto own = row_major_strides(f.cardinalities());
    std::vector<std::size_t> out(target_scope.size(), 0);
    for (std::size_t i = 0; i < target_scope.size(); ++i) {
        const auto& s = f.scope();
        auto it = std::find(s.begin(), s.end(), target_scope[i]);
        if (it != s.end()) {
            out[i] = own[static_cast<std::size_t>(it - s.begin())];
        }
    }
    return out;
}

/// Calls visit(result_flat, f_flat) for every configuration of `scope`,
/// tracking f's flat index along the way.
template <typename Visit>
void walk(const std::vector<std::size_t>& cards, const std::vector<std::size_t>& f_strides, Visit&& visit) {
    const std::size_t n = cards.size();
    const std::size_t total = ConfigCounter::count(cards);
    std::vector<std::size_t> digits(n, 0);
    std::size_t fi = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        visit(flat, fi);
        for (std::size_t k = n; k-- > 0;) {
            if (++digits[k] < cards[k]) {
                fi += f_strides[k];
                break;
            }
            fi -= f_strides[k] * (cards[k] - 1);
            digits[k] = 0;
        }
    }
}

void check_subset(const Factor& f, std::span<const VarId> vars) {
    for (VarId v : vars) {
        if (!f.contains(v)) {
            throw Error(ErrorCode::var_not_in_scope, "variable " + std::to_string(v) + " is not in the factor scope");
        }
    }
}

}  // namespace

Semantics join(Semantics a, Semantics b) {
    if (a == Semantics::valuation || b == Semantics::valuation) return Semantics::valuation;
    if (a == Semantics::likelihood || b == Semantics::likelihood) return Semantics::likelihood;
    if (a == Semantics::utility || b == Semantics::utility) return Semantics::utility;
    return Semantics::probability;
}

Factor::Factor(std::vector<VarId> scope, std::vector<std::size_t> cardinalities, std::vector<double> values,
               Semantics semantics)
    : scope_(std::move(scope)), cards_(std::move(cardinalities)), values_(std::move(values)), semantics_(semantics) {
    if (scope_.size() != cards_.size()) {
        throw Error(ErrorCode::invalid_argument, "scope and cardinality lists differ in length");
    }
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        if (cards_[i] == 0) {
            throw Error(ErrorCode::invalid_argument, "zero cardinality in factor scope");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (scope_[i] == scope_[j]) {
                throw Error(ErrorCode::invalid_argument, "variable repeated in factor scope");
            }
        }
    }
    if (values_.size() != ConfigCounter::count(cards_)) {
        throw Error(ErrorCode::invalid_argument,
                    "table has " + std::to_string(values_.size()) + " entries, expected " +
                        std::to_string(ConfigCounter::count(cards_)));
    }
}

Factor Factor::constant(double value, Semantics semantics) { return Factor({}, {}, {value}, semantics); }

Factor Factor::filled(std::vector<VarId> scope, std::vector<std::size_t> cardinalities, double value,
                      Semantics semantics) {
    const std::size_t n = ConfigCounter::count(cardinalities);
    return Factor(std::move(scope), std::move(cardinalities), std::vector<double>(n, value), semantics);
}

Factor Factor::indicator(VarId var, std::size_t cardinality, std::size_t outcome) {
    if (outcome >= cardinality) {
        throw Error(ErrorCode::index_out_of_range, "indicator outcome out of range");
    }
    std::vector<double> v(cardinality, 0.0);
    v[outcome] = 1.0;
    return Factor({var}, {cardinality}, std::move(v), Semantics::likelihood);
}

bool Factor::contains(VarId v) const { return std::find(scope_.begin(), scope_.end(), v) != scope_.end(); }

std::size_t Factor::axis(VarId v) const {
    auto it = std::find(scope_.begin(), scope_.end(), v);
    if (it == scope_.end()) {
        throw Error(ErrorCode::var_not_in_scope, "variable " + std::to_string(v) + " is not in the factor scope");
    }
    return static_cast<std::size_t>(it - scope_.begin());
}

std::size_t Factor::flat_index(const Assignment& a) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        auto it = a.find(scope_[i]);
        if (it == a.end()) {
            throw Error(ErrorCode::var_not_in_scope, "assignment misses variable " + std::to_string(scope_[i]));
        }
        if (it->second >= cards_[i]) {
            throw Error(ErrorCode::index_out_of_range, "outcome index out of range");
        }
        flat = flat * cards_[i] + it->second;
    }
    return flat;
}

double Factor::at(const Assignment& a) const { return values_[flat_index(a)]; }

std::vector<std::size_t> Factor::unflatten(std::size_t flat) const {
    std::vector<std::size_t> digits(scope_.size(), 0);
    for (std::size_t i = scope_.size(); i-- > 0;) {
        digits[i] = flat % cards_[i];
        flat /= cards_[i];
    }
    return digits;
}

double Factor::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }
double Factor::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Factor::max() const { return *std::max_element(values_.begin(), values_.end()); }

Factor multiply(const Factor& f, const Factor& g) {
    std::vector<VarId> scope = f.scope();
    std::vector<std::size_t> cards = f.cardinalities();
    for (std::size_t i = 0; i < g.scope().size(); ++i) {
        const VarId v = g.scope()[i];
        auto it = std::find(scope.begin(), scope.end(), v);
        if (it == scope.end()) {
            scope.push_back(v);
            cards.push_back(g.cardinalities()[i]);
        } else if (cards[static_cast<std::size_t>(it - scope.begin())] != g.cardinalities()[i]) {
            throw Error(ErrorCode::cardinality_mismatch,
                        "variable " + std::to_string(v) + " has different cardinalities in the two factors");
        }
    }
    const auto fs = strides_along(f, scope);
    const auto gs = strides_along(g, scope);
    const std::size_t total = ConfigCounter::count(cards);
    std::vector<double> out(total);
    std::vector<std::size_t> digits(scope.size(), 0);
    std::size_t fi = 0;
    std::size_t gi = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        out[flat] = f[fi] * g[gi];
        for (std::size_t k = scope.size(); k-- > 0;) {
            if (++digits[k] < cards[k]) {
                fi += fs[k];
                gi += gs[k];
                break;
            }
            fi -= fs[k] * (cards[k] - 1);
            gi -= gs[k] * (cards[k] - 1);
            digits[k] = 0;
        }
    }
    return Factor(std::move(scope), std::move(cards), std::move(out), join(f.semantics(), g.semantics()));
}

Factor marginalize_sum(const Factor& f, std::span<const VarId> vars) {
    check_subset(f, vars);
    if (vars.empty()) return f;
    std::vector<VarId> keep;
    std::vector<std::size_t> keep_cards;
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
        if (std::find(vars.begin(), vars.end(), f.scope()[i]) == vars.end()) {
            keep.push_back(f.scope()[i]);
            keep_cards.push_back(f.cardinalities()[i]);
        }
    }
    Factor kept = Factor::filled(keep, keep_cards, 0.0);
    const auto ks = strides_along(kept, f.scope());
    std::vector<double>& out = kept.values();
    walk(f.cardinalities(), ks, [&](std::size_t flat, std::size_t ki) { out[ki] += f[flat]; });
    kept.set_semantics(f.semantics());
    return kept;
}

MaxMarginal marginalize_max(const Factor& f, std::span<const VarId> vars) {
    check_subset(f, vars);
    if (vars.empty()) return {f, {}};
    // Eliminated variables keep the order in which they appear in `vars`.
    std::vector<VarId> elim(vars.begin(), vars.end());
    std::vector<std::size_t> elim_cards;
    for (VarId v : elim) elim_cards.push_back(f.cardinality(v));
    std::vector<VarId> keep;
    std::vector<std::size_t> keep_cards;
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
        if (std::find(elim.begin(), elim.end(), f.scope()[i]) == elim.end()) {
            keep.push_back(f.scope()[i]);
            keep_cards.push_back(f.cardinalities()[i]);
        }
    }
    // Visit retained-major, eliminated-minor so the first maximum seen has the
    // lowest eliminated index.
    std::vector<VarId> visit_scope = keep;
    visit_scope.insert(visit_scope.end(), elim.begin(), elim.end());
    std::vector<std::size_t> visit_cards = keep_cards;
    visit_cards.insert(visit_cards.end(), elim_cards.begin(), elim_cards.end());
    const auto fs = strides_along(f, visit_scope);
    const std::size_t n_elim = ConfigCounter::count(elim_cards);
    const std::size_t n_keep = ConfigCounter::count(keep_cards);
    std::vector<double> best(n_keep, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> arg(n_keep, 0);
    walk(visit_cards, fs, [&](std::size_t flat, std::size_t fi) {
        const std::size_t k = flat / n_elim;
        const double v = f[fi];
        if (v > best[k]) {
            best[k] = v;
            arg[k] = flat % n_elim;
        }
    });
    Factor m(std::move(keep), std::move(keep_cards), std::move(best), f.semantics());
    return {std::move(m), ArgmaxTable{std::move(elim), std::move(elim_cards), std::move(arg)}};
}

Factor reduce(const Factor& f, const Assignment& evidence) {
    std::vector<VarId> keep;
    std::vector<std::size_t> keep_cards;
    std::size_t offset = 0;
    const auto strides = row_major_strides(f.cardinalities());
    std::vector<std::size_t> keep_strides;
    for (const auto& [v, idx] : evidence) {
        if (!f.contains(v)) continue;
        const std::size_t ax = f.axis(v);
        if (idx >= f.cardinalities()[ax]) {
            throw Error(ErrorCode::index_out_of_range, "evidence outcome out of range for variable " + std::to_string(v));
        }
        offset += idx * strides[ax];
    }
    for (std::size_t i = 0; i < f.scope().size(); ++i) {
        if (!evidence.contains(f.scope()[i])) {
            keep.push_back(f.scope()[i]);
            keep_cards.push_back(f.cardinalities()[i]);
            keep_strides.push_back(strides[i]);
        }
    }
    std::vector<double> out(ConfigCounter::count(keep_cards));
    walk(keep_cards, keep_strides, [&](std::size_t flat, std::size_t fi) { out[flat] = f[offset + fi]; });
    return Factor(std::move(keep), std::move(keep_cards), std::move(out), f.semantics());
}

Factor align(const Factor& f, std::span<const VarId> order) {
    if (order.size() != f.scope().size()) {
        throw Error(ErrorCode::invalid_argument, "alignment order is not a permutation of the scope");
    }
    std::vector<VarId> scope(order.begin(), order.end());
    std::vector<std::size_t> cards;
    for (VarId v : scope) cards.push_back(f.cardinality(v));
    const auto fs = strides_along(f, scope);
    std::vector<double> out(f.size());
    walk(cards, fs, [&](std::size_t flat, std::size_t fi) { out[flat] = f[fi]; });
    return Factor(std::move(scope), std::move(cards), std::move(out), f.semantics());
}

bool approx_equal(const Factor& f, const Factor& g, double tol) {
    if (f.scope().size() != g.scope().size()) return false;
    for (VarId v : f.scope()) {
        if (!g.contains(v) || g.cardinality(v) != f.cardinality(v)) return false;
    }
    const Factor ga = align(g, f.scope());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(f[i] - ga[i]) > tol) return false;
    }
    return true;
}

Factor product(std::span<const Factor> factors) {
    Factor out = Factor::constant(1.0);
    for (const auto& f : factors) out = multiply(out, f);
    return out;
}

ConfigCounter::ConfigCounter(std::vector<std::size_t> cards)
    : cards_(std::move(cards)), digits_(cards_.size(), 0), done_(count(cards_) == 0) {}

void ConfigCounter::next() {
    for (std::size_t k = cards_.size(); k-- > 0;) {
        if (++digits_[k] < cards_[k]) return;
        digits_[k] = 0;
    }
    done_ = true;
}

std::size_t ConfigCounter::count(std::span<const std::size_t> cards) {
    std::size_t n = 1;
    for (std::size_t c : cards) n *= c;
    return n;
}

}  // namespace idsolve
