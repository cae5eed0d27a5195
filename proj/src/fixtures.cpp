#include "idsolve/fixtures.hpp"

#include <algorithm>

namespace idsolve::fixtures {

InfluenceDiagram umbrella() {
    InfluenceDiagram d;
    const VarId w = d.add_chance("Weather", {"sun", "rain"});
    const VarId f = d.add_chance("Forecast", {"sunny", "rainy"});
    const VarId b = d.add_decision("Bring Umbrella", {"leave", "take"});
    const VarId s = d.add_value("Satisfaction");
    d.add_arc(w, f);
    d.add_arc(f, b);
    d.add_arc(w, s);
    d.add_arc(b, s);
    d.set_cpt(w, {}, {0.7, 0.3});
    d.set_cpt(f, {w}, {0.85, 0.15, 0.2, 0.8});
    d.set_value_table(s, {w, b}, {100, 80, 0, 70});
    d.set_decision_order({b});
    return d;
}

InfluenceDiagram umbrella_tv(bool newspaper_observed) {
    InfluenceDiagram d;
    const VarId w = d.add_chance("Weather", {"sun", "rain"});
    const VarId n = d.add_chance("Newspaper", {"sunny", "rainy"});
    const VarId t = d.add_decision("TV Station", {"channel_a", "channel_b"});
    const VarId f = d.add_chance("Forecast", {"sunny", "rainy"});
    const VarId b = d.add_decision("Bring Umbrella", {"leave", "take"});
    const VarId s = d.add_value("Satisfaction");
    d.add_arc(w, n);
    if (newspaper_observed) {
        d.add_arc(n, t);
        d.add_arc(n, b);
    }
    d.add_arc(w, f);
    d.add_arc(t, f);
    d.add_arc(t, b);
    d.add_arc(f, b);
    d.add_arc(w, s);
    d.add_arc(b, s);
    d.set_cpt(w, {}, {0.7, 0.3});
    d.set_cpt(n, {w}, {0.8, 0.2, 0.3, 0.7});
    // channel_a is sharp on sunny days, channel_b on rainy ones.
    d.set_cpt(f, {w, t}, {0.9, 0.1, 0.6, 0.4, 0.4, 0.6, 0.05, 0.95});
    d.set_value_table(s, {w, b}, {100, 80, 0, 70});
    d.set_decision_order({t, b});
    if (newspaper_observed) d.set_evidence(n, 1);
    return d;
}

namespace {

std::vector<double> random_cpt(std::mt19937_64& rng, std::size_t rows, std::size_t k, double floor) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> w(k);
        double total = 0.0;
        for (auto& x : w) total += (x = u(rng));
        for (double x : w) out.push_back(floor + (1.0 - floor * static_cast<double>(k)) * x / total);
    }
    return out;
}

std::size_t rows_of(const InfluenceDiagram& d, const std::vector<VarId>& vs) {
    std::size_t r = 1;
    for (VarId v : vs) r *= d.variable(v).cardinality();
    return r;
}

}  // namespace

InfluenceDiagram mdp_chain(std::size_t periods, Combination c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> reward(0.0, 10.0);
    InfluenceDiagram d;
    std::vector<VarId> states, decisions, values;
    states.push_back(d.add_chance("State 1", {"low", "high"}));
    for (std::size_t i = 1; i <= periods; ++i) {
        decisions.push_back(d.add_decision("Decision " + std::to_string(i), {"wait", "act"}));
        states.push_back(d.add_chance("State " + std::to_string(i + 1), {"low", "high"}));
        values.push_back(d.add_value("Value " + std::to_string(i)));
    }
    d.set_cpt(states[0], {}, random_cpt(rng, 1, 2, 0.01));
    for (std::size_t i = 0; i < periods; ++i) {
        for (std::size_t j = 0; j <= i; ++j) d.add_arc(states[j], decisions[i]);
        for (std::size_t j = 0; j < i; ++j) d.add_arc(decisions[j], decisions[i]);
        d.add_arc(states[i], states[i + 1]);
        d.add_arc(decisions[i], states[i + 1]);
        d.set_cpt(states[i + 1], {states[i], decisions[i]}, random_cpt(rng, 4, 2, 0.01));
        d.add_arc(decisions[i], values[i]);
        d.add_arc(states[i + 1], values[i]);
        std::vector<double> v(4);
        for (auto& x : v) x = reward(rng);
        d.set_value_table(values[i], {decisions[i], states[i + 1]}, v);
    }
    d.set_decision_order(decisions);
    d.set_combination(periods > 1 ? c : Combination::none);
    return d;
}

InfluenceDiagram random_diagram(std::mt19937_64& rng, const RandomSpec& spec) {
    const auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::bernoulli_distribution coin(0.5);
    const std::size_t nc = pick(spec.min_chance, spec.max_chance);
    const std::size_t nd = pick(spec.min_decisions, spec.max_decisions);
    std::vector<bool> is_decision(nc + nd, false);
    for (std::size_t k = 0; k < nd; ++k) is_decision[k] = true;
    std::shuffle(is_decision.begin(), is_decision.end(), rng);

    InfluenceDiagram d;
    std::vector<VarId> nodes, decisions;
    std::size_t ci = 0, di = 0;
    for (bool dec : is_decision) {
        if (dec) {
            std::vector<std::string> alts;
            const std::size_t k = pick(2, spec.max_alternatives);
            for (std::size_t a = 0; a < k; ++a) alts.push_back("a" + std::to_string(a));
            decisions.push_back(d.add_decision("D" + std::to_string(di++), alts));
            nodes.push_back(decisions.back());
        } else {
            nodes.push_back(d.add_chance("X" + std::to_string(ci++), {"f", "t"}));
        }
    }
    // Parents from earlier nodes; decisions observe chance variables only and
    // get the memory arcs afterwards.
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const VarId v = nodes[k];
        std::vector<VarId> cand;
        for (std::size_t j = 0; j < k; ++j) {
            if (!is_decision[k] || !is_decision[j]) cand.push_back(nodes[j]);
        }
        std::shuffle(cand.begin(), cand.end(), rng);
        std::vector<VarId> parents;
        for (VarId p : cand) {
            if (parents.size() < spec.max_parents && coin(rng)) parents.push_back(p);
        }
        std::sort(parents.begin(), parents.end());
        for (VarId p : parents) d.add_arc(p, v);
        if (!is_decision[k]) d.set_cpt(v, parents, random_cpt(rng, rows_of(d, parents), 2, spec.min_probability));
    }
    d.set_decision_order(decisions);
    d = complete_no_forgetting(d);

    const VarId value = d.add_value("V");
    std::vector<VarId> attrs;
    std::vector<VarId> pool(nodes.begin(), nodes.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t na = pick(1, std::min<std::size_t>(3, pool.size()));
    attrs.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(na));
    if (std::none_of(attrs.begin(), attrs.end(), [&](VarId a) { return d.variable(a).kind == VarKind::decision; }) &&
        std::bernoulli_distribution(0.8)(rng)) {
        attrs.back() = decisions[pick(0, decisions.size() - 1)];
    }
    std::sort(attrs.begin(), attrs.end());
    attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
    for (VarId a : attrs) d.add_arc(a, value);
    std::uniform_real_distribution<double> val(spec.value_lo, spec.value_hi);
    std::vector<double> table(rows_of(d, attrs));
    for (auto& x : table) x = val(rng);
    d.set_value_table(value, attrs, table);

    if (spec.evidence) {
        const Dag dag = dag_of(d);
        std::set<VarId> influenced;
        for (VarId dec : decisions) {
            std::vector<VarId> stack{dec};
            while (!stack.empty()) {
                const VarId x = stack.back();
                stack.pop_back();
                for (VarId c : dag.children[x]) {
                    if (influenced.insert(c).second) stack.push_back(c);
                }
            }
        }
        std::vector<VarId> eligible;
        for (VarId v : nodes) {
            if (d.variable(v).kind == VarKind::chance && !influenced.contains(v)) eligible.push_back(v);
        }
        if (!eligible.empty()) d.set_evidence(eligible[pick(0, eligible.size() - 1)], pick(0, 1));
    }
    return d;
}

InfluenceDiagram random_network(std::mt19937_64& rng, std::size_t n, std::size_t max_parents, double min_probability) {
    std::bernoulli_distribution coin(0.5);
    InfluenceDiagram d;
    std::vector<VarId> nodes;
    for (std::size_t k = 0; k < n; ++k) nodes.push_back(d.add_chance("X" + std::to_string(k), {"f", "t"}));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<VarId> cand(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k));
        std::shuffle(cand.begin(), cand.end(), rng);
        std::vector<VarId> parents;
        for (VarId p : cand) {
            if (parents.size() < max_parents && coin(rng)) parents.push_back(p);
        }
        std::shuffle(parents.begin(), parents.end(), rng);
        for (VarId p : parents) d.add_arc(p, nodes[k]);
        d.set_cpt(nodes[k], parents, random_cpt(rng, rows_of(d, parents), 2, min_probability));
    }
    return d;
}

InfluenceDiagram affine_values(const InfluenceDiagram& d, double alpha, double beta) {
    if (d.combination() == Combination::product && d.value_nodes().size() > 1) {
        throw Error(ErrorCode::invalid_argument, "an affine map does not distribute over a product");
    }
    InfluenceDiagram out = d;
    bool first = true;
    for (const auto& [v, f] : d.value_tables()) {
        std::vector<double> vals = f.values();
        for (auto& x : vals) x = alpha * x + (first ? beta : 0.0);
        out.set_value_table(v, f.scope(), vals);
        first = false;
    }
    return out;
}

}  // namespace idsolve::fixtures
