#pragma once

// Test-side references. Nothing here calls the oracle or a solver backend:
// joints are products of CPT entries over every configuration.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "idsolve/factor.hpp"
#include "idsolve/model.hpp"

namespace support {

using namespace idsolve;

/// Every configuration of the non-value variables with its weight
/// Π P(x | pa) (decisions fixed by `fixed`, evidence enforced).
struct World {
    std::vector<std::size_t> config;
    double weight = 0.0;
};

inline std::vector<World> worlds(const InfluenceDiagram& d, const Assignment& fixed = {}) {
    std::vector<VarId> vars;
    std::vector<std::size_t> cards;
    for (VarId v = 0; v < d.size(); ++v) {
        if (d.variable(v).kind == VarKind::value) continue;
        vars.push_back(v);
        cards.push_back(d.variable(v).cardinality());
    }
    std::vector<World> out;
    for (ConfigCounter c(cards); !c.done(); c.next()) {
        Assignment a;
        std::vector<std::size_t> config(d.size(), 0);
        bool keep = true;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            a[vars[k]] = c.digits()[k];
            config[vars[k]] = c.digits()[k];
            if (auto it = fixed.find(vars[k]); it != fixed.end() && it->second != c.digits()[k]) keep = false;
            if (auto it = d.evidence().find(vars[k]); it != d.evidence().end() && it->second != c.digits()[k]) keep = false;
        }
        if (!keep) continue;
        double w = 1.0;
        for (const auto& [v, f] : d.cpts()) w *= f.at(a);
        out.push_back({config, w});
    }
    return out;
}

inline double total_value(const InfluenceDiagram& d, const std::vector<std::size_t>& config) {
    const bool prod = d.combination() == Combination::product;
    double acc = prod ? 1.0 : 0.0;
    for (const auto& [v, f] : d.value_tables()) {
        Assignment a;
        for (VarId s : f.scope()) a[s] = config[s];
        acc = prod ? acc * f.at(a) : acc + f.at(a);
    }
    return acc;
}

inline double evidence_probability(const InfluenceDiagram& d) {
    // Decisions do not influence the evidence, so any fixed choice works.
    Assignment fixed;
    for (VarId dv : d.decision_order()) fixed[dv] = 0;
    double p = 0.0;
    for (const auto& w : worlds(d, fixed)) p += w.weight;
    return p;
}

/// Marginal over `query` given the evidence, row-major in query order.
inline std::vector<double> posterior(const InfluenceDiagram& d, const std::vector<VarId>& query) {
    std::vector<std::size_t> cards;
    for (VarId q : query) cards.push_back(d.variable(q).cardinality());
    std::vector<double> out(ConfigCounter::count(cards), 0.0);
    double total = 0.0;
    for (const auto& w : worlds(d)) {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < query.size(); ++k) flat = flat * cards[k] + w.config[query[k]];
        out[flat] += w.weight;
        total += w.weight;
    }
    for (auto& x : out) x /= total;
    return out;
}

/// Single decision: E{v | D=d, R=r} and P{R=r} for every (r, d), r row-major
/// over `relevant`. The decision is set by intervention.
struct Conditional {
    std::vector<std::vector<double>> ev;
    std::vector<double> p_r;
};

inline Conditional conditional_values(const InfluenceDiagram& d, VarId decision, const std::vector<VarId>& relevant) {
    std::vector<std::size_t> cards;
    for (VarId r : relevant) cards.push_back(d.variable(r).cardinality());
    const std::size_t rows = ConfigCounter::count(cards);
    const std::size_t n = d.variable(decision).cardinality();
    Conditional out;
    out.ev.assign(rows, std::vector<double>(n, 0.0));
    out.p_r.assign(rows, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<double> mass(rows, 0.0), weighted(rows, 0.0);
        for (const auto& w : worlds(d, {{decision, a}})) {
            std::size_t flat = 0;
            for (std::size_t k = 0; k < relevant.size(); ++k) flat = flat * cards[k] + w.config[relevant[k]];
            mass[flat] += w.weight;
            weighted[flat] += w.weight * total_value(d, w.config);
        }
        for (std::size_t r = 0; r < rows; ++r) {
            if (mass[r] > 0.0) out.ev[r][a] = weighted[r] / mass[r];
            if (a == 0) out.p_r[r] = mass[r];
        }
    }
    return out;
}

/// Indices within 1e-12 of the row maximum after scaling the row to max 1.
inline std::set<std::size_t> argmax_set(const std::vector<double>& row) {
    double hi = -INFINITY, scale = 0.0;
    for (double x : row) {
        hi = std::max(hi, x);
        scale = std::max(scale, std::abs(x));
    }
    std::set<std::size_t> s;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double a = std::round(row[k] / std::max(scale, 1e-300) * 1e12);
        const double b = std::round(hi / std::max(scale, 1e-300) * 1e12);
        if (a == b) s.insert(k);
    }
    return s;
}

inline Factor random_factor(std::mt19937_64& rng, std::vector<VarId> scope, std::vector<std::size_t> cards,
                            double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(ConfigCounter::count(cards));
    for (auto& x : v) x = u(rng);
    return Factor(std::move(scope), std::move(cards), std::move(v));
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace support
