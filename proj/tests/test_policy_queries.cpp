#include <catch_amalgamated.hpp>

#include <random>

#include "idsolve/fixtures.hpp"
#include "idsolve/inference.hpp"
#include "idsolve/oracle.hpp"
#include "idsolve/queries.hpp"
#include "support.hpp"

using namespace idsolve;
using Catch::Matchers::WithinAbs;

namespace {

/// P{D, R | U=1, E=e} on the belief network (no pruning), axes (R..., D).
Factor posterior_given_utility(const Network& net, std::size_t i) {
    std::vector<VarId> fam = net.decision_scopes[i];
    fam.push_back(net.decisions[i]);
    std::vector<std::vector<VarId>> cons{fam};
    ClusterTree t = build_cluster_tree(net, cons);
    std::vector<Factor> tables;
    for (const auto& [v, f] : net.tables) tables.push_back(f);
    Assignment ev = net.evidence;
    ev[*net.value_var] = 1;
    initialize_potentials(t, tables, ev);
    return align(marginal(t, fam).posterior, fam);
}

}  // namespace

TEST_CASE("extract_policy: umbrella posterior") {
    const auto d = fixtures::umbrella();
    const Network net = to_belief_network(d);
    const Factor joint = posterior_given_utility(net, 0);
    const auto rule = extract_policy(joint, d.index_of("Bring Umbrella"));
    // Rows over Forecast: sunny -> leave, rainy -> take.
    CHECK(rule.choice == std::vector<std::size_t>{0, 1});
    CHECK(rule.zero_rows.empty());
}

TEST_CASE("extract_policy: ties, zero rows and negatives") {
    Factor flat({0, 1}, {2, 3}, {0.2, 0.2, 0.2, 0.1, 0.1, 0.1});
    auto r = extract_policy(flat, 1);
    CHECK(r.choice == std::vector<std::size_t>{0, 0});

    Factor zero({0, 1}, {2, 2}, {0.0, 0.0, 0.3, 0.7});
    auto z = extract_policy(zero, 1);
    CHECK(z.choice == std::vector<std::size_t>{0, 1});
    CHECK(z.zero_rows == std::vector<std::size_t>{0});

    Factor neg({0, 1}, {2, 2}, {0.1, -0.1, 0.3, 0.7});
    try {
        (void)extract_policy(neg, 1);
        FAIL("expected NEGATIVE_ENTRY");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::negative_entry);
    }
    // With an explicit weight negatives are fine.
    Factor weight({0}, {2}, {1.0, 0.0});
    auto w = extract_policy(neg, 1, weight);
    CHECK(w.choice == std::vector<std::size_t>{0, 0});
    CHECK(w.zero_rows == std::vector<std::size_t>{1});
}

TEST_CASE("rule indicator rows are distributions") {
    const auto d = fixtures::umbrella_tv();
    const auto r = solve_by_queries(d);
    for (const auto& rule : r.policy.rules) {
        const Factor ind = rule_indicator(rule, d);
        const VarId dv = d.index_of(rule.decision);
        const Factor rows = marginalize_sum(ind, std::vector<VarId>{dv});
        for (double x : rows.values()) CHECK(x == 1.0);
    }
}

TEST_CASE("solve_by_queries: umbrella") {
    const auto d = fixtures::umbrella();
    const auto r = solve_by_queries(d);
    const auto oracle = brute_solve(d);
    CHECK_THAT(r.mev, WithinAbs(oracle.mev, 1e-9));
    CHECK_THAT(r.mev, WithinAbs(84.7, 1e-9));
    REQUIRE(r.policy.rules.size() == 1);
    CHECK(r.policy.rules[0].scope == std::vector<std::string>{"Forecast"});
    CHECK(r.policy.rules[0].choice == std::vector<std::size_t>{0, 1});
    REQUIRE(r.meu.has_value());
    CHECK_THAT(*r.meu, WithinAbs(0.847, 1e-12));
    CHECK(r.diagnostics.backend == "queries");
}

TEST_CASE("solve_by_queries: two decisions") {
    for (bool observed : {true, false}) {
        const auto d = fixtures::umbrella_tv(observed);
        const auto r = solve_by_queries(d);
        const auto oracle = brute_solve(d);
        CHECK_THAT(r.mev, WithinAbs(oracle.mev, 1e-9));
        CHECK_THAT(expected_value(d, r.policy).ev, WithinAbs(oracle.mev, 1e-9));
        CHECK(r.policy.rules.size() == 2);
    }
    const auto d = fixtures::umbrella_tv();
    CHECK_THAT(solve_by_queries(d).evidence_probability, WithinAbs(0.35, 1e-12));
}

TEST_CASE("solve_by_queries: no uncertainty") {
    InfluenceDiagram d;
    const VarId dec = d.add_decision("D", {"a", "b", "c"});
    const VarId v = d.add_value("V");
    d.add_arc(dec, v);
    d.set_value_table(v, {dec}, {3, 9, -1});
    d.set_decision_order({dec});
    const auto r = solve_by_queries(d);
    CHECK_THAT(r.mev, WithinAbs(9.0, 1e-12));
    CHECK(r.policy.rules[0].choice == std::vector<std::size_t>{1});
}

TEST_CASE("solve_by_queries: constant utility short-circuits") {
    auto d = fixtures::umbrella();
    d.set_value_table(d.index_of("Satisfaction"), {d.index_of("Weather"), d.index_of("Bring Umbrella")},
                      {4, 4, 4, 4});
    const auto r = solve_by_queries(d);
    CHECK(r.diagnostics.degenerate);
    CHECK_THAT(r.mev, WithinAbs(4.0, 1e-12));
    for (const auto& rule : r.policy.rules) {
        for (std::size_t c : rule.choice) CHECK(c == 0);
    }
}

TEST_CASE("property: argmax of P(d, r | U=1) is the argmax of E(u | d, r)") {
    std::mt19937_64 rng(51);
    fixtures::RandomSpec spec;
    spec.max_decisions = 1;
    spec.evidence = true;
    std::size_t rows = 0, diagrams = 0;
    while (diagrams < 100) {
        const auto d = fixtures::random_diagram(rng, spec);
        if (d.decision_order().size() != 1) continue;
        Network net;
        try {
            net = to_belief_network(d, {.prune = false});
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::degenerate_value);
            continue;
        }
        ++diagrams;
        const VarId dec = net.decisions[0];
        const auto& rel = net.decision_scopes[0];
        const auto direct = support::conditional_values(d, dec, rel);
        Factor joint;
        try {
            joint = posterior_given_utility(net, 0);
        } catch (const Error& e) {
            // Every reachable outcome sits at v_min: U=1 is impossible and
            // every alternative ties.
            REQUIRE(e.code() == ErrorCode::zero_evidence_probability);
            for (std::size_t r = 0; r < direct.p_r.size(); ++r) {
                for (double x : direct.ev[r]) {
                    if (direct.p_r[r] > 0.0) CHECK_THAT(x, WithinAbs(net.scale->v_min, 1e-12));
                }
            }
            continue;
        }
        const std::size_t n = d.variable(dec).cardinality();
        for (std::size_t r = 0; r < direct.p_r.size(); ++r) {
            if (direct.p_r[r] <= 0.0) continue;
            std::vector<double> p(n), u(n);
            for (std::size_t a = 0; a < n; ++a) {
                p[a] = joint[r * n + a];
                u[a] = net.scale->rescale(direct.ev[r][a]);
            }
            CHECK(support::argmax_set(p) == support::argmax_set(u));
            ++rows;
        }
        // The installed choice is in both sets.
        const auto res = solve_by_queries(d, {.transform = {.prune = false}});
        const auto& rule = res.policy.rules[0];
        for (std::size_t r = 0; r < direct.p_r.size(); ++r) {
            if (direct.p_r[r] <= 0.0) continue;
            std::vector<double> u(n);
            for (std::size_t a = 0; a < n; ++a) u[a] = net.scale->rescale(direct.ev[r][a]);
            CHECK(support::argmax_set(u).contains(rule.choice[r]));
        }
    }
    CHECK(rows > 100);
}

TEST_CASE("property: installing the policy never lowers P(U=1)") {
    std::mt19937_64 rng(52);
    fixtures::RandomSpec spec;
    spec.evidence = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = fixtures::random_diagram(rng, spec);
        const auto r = solve_by_queries(d);
        if (r.diagnostics.degenerate) continue;
        const Network net = to_belief_network(d);
        ClusterTree t = build_cluster_tree(net);
        std::vector<Factor> tables;
        for (const auto& [v, f] : net.tables) tables.push_back(f);
        initialize_potentials(t, tables, net.evidence);
        const double uniform = marginal(t, std::vector<VarId>{*net.value_var}).posterior[1];
        CHECK(*r.meu >= uniform - 1e-12);
    }
}

TEST_CASE("property: queries agree with the oracle") {
    std::mt19937_64 rng(53);
    fixtures::RandomSpec spec;
    spec.evidence = true;
    for (int trial = 0; trial < 150; ++trial) {
        const auto d = fixtures::random_diagram(rng, spec);
        const auto oracle = brute_solve(d);
        for (auto mode : {EvidenceMode::indicator, EvidenceMode::reduce}) {
            const auto r = solve_by_queries(d, {.evidence_mode = mode});
            CHECK_THAT(r.mev, WithinAbs(oracle.mev, 1e-9));
            CHECK_THAT(expected_value(d, r.policy).ev, WithinAbs(oracle.mev, 1e-9));
            CHECK_THAT(r.evidence_probability, WithinAbs(oracle.evidence_probability, 1e-12));
        }
    }
}
