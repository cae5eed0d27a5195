#include <catch_amalgamated.hpp>

#include <random>

#include "idsolve/fixtures.hpp"
#include "idsolve/oracle.hpp"
#include "idsolve/queries.hpp"
#include "idsolve/transform.hpp"
#include "support.hpp"

using namespace idsolve;
using Catch::Matchers::WithinAbs;

namespace {

std::set<std::string> parent_ids(const Network& net, VarId v) {
    std::set<std::string> out;
    const Factor& t = net.tables.at(v);
    for (std::size_t k = 0; k + 1 < t.scope().size(); ++k) out.insert(net.variables[t.scope()[k]].id);
    return out;
}

}  // namespace

TEST_CASE("belief network of the umbrella problem") {
    const auto d = fixtures::umbrella();
    const Network net = to_belief_network(d);
    const VarId w = d.index_of("Weather"), f = d.index_of("Forecast"), b = d.index_of("Bring Umbrella"),
                u = d.index_of("Satisfaction");
    REQUIRE(net.value_var == u);
    CHECK(net.variables[u].outcomes == std::vector<std::string>{"0", "1"});
    CHECK(parent_ids(net, f) == std::set<std::string>{"Weather"});
    CHECK(parent_ids(net, b) == std::set<std::string>{"Forecast"});
    CHECK(parent_ids(net, u) == std::set<std::string>{"Bring Umbrella", "Weather"});
    for (double x : net.tables.at(b).values()) CHECK(x == 0.5);

    // u = v / 100 on a [0, 100] table, as rows [1 - u, u].
    const Factor& ut = net.tables.at(u);
    REQUIRE(net.scale.has_value());
    CHECK(net.scale->v_min == 0.0);
    CHECK(net.scale->v_max == 100.0);
    const double sat[2][2] = {{100, 80}, {0, 70}};
    for (std::size_t wi = 0; wi < 2; ++wi) {
        for (std::size_t bi = 0; bi < 2; ++bi) {
            CHECK_THAT(ut.at({{w, wi}, {b, bi}, {u, 1}}), WithinAbs(sat[wi][bi] / 100.0, 1e-15));
            CHECK_THAT(ut.at({{w, wi}, {b, bi}, {u, 0}}), WithinAbs(1.0 - sat[wi][bi] / 100.0, 1e-15));
        }
    }
}

TEST_CASE("converted CPTs are normalized") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = fixtures::random_diagram(rng);
        const Network net = to_belief_network(d);
        for (const auto& [v, t] : net.tables) {
            Factor s = marginalize_sum(t, std::vector<VarId>{v});
            for (double x : s.values()) CHECK_THAT(x, WithinAbs(1.0, 1e-9));
        }
        for (std::size_t i = 0; i < net.decisions.size(); ++i) {
            const double n = static_cast<double>(net.variables[net.decisions[i]].cardinality());
            for (double x : net.tables.at(net.decisions[i]).values()) CHECK(x == 1.0 / n);
        }
    }
}

TEST_CASE("constant value table is degenerate") {
    auto d = fixtures::umbrella();
    d.set_value_table(d.index_of("Satisfaction"), {d.index_of("Weather"), d.index_of("Bring Umbrella")},
                      {5, 5, 5, 5});
    try {
        (void)to_belief_network(d);
        FAIL("expected DEGENERATE_VALUE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_value);
    }
    // The valuation encoding has no rescale and accepts it.
    CHECK_NOTHROW(to_valuation_network(d));
}

TEST_CASE("valuation network keeps raw values") {
    auto d = fixtures::umbrella();
    const VarId w = d.index_of("Weather"), b = d.index_of("Bring Umbrella"), v = d.index_of("Satisfaction");
    const Network net = to_valuation_network(d);
    const Factor& vt = net.tables.at(v);
    CHECK(vt.semantics() == Semantics::valuation);
    const double sat[2][2] = {{100, 80}, {0, 70}};
    for (std::size_t wi = 0; wi < 2; ++wi) {
        for (std::size_t bi = 0; bi < 2; ++bi) {
            CHECK(vt.at({{w, wi}, {b, bi}, {v, 1}}) == sat[wi][bi]);
            CHECK(vt.at({{w, wi}, {b, bi}, {v, 0}}) == 1.0);
        }
    }

    d.set_value_table(v, {w, b}, {-3, 2, -50, 7});
    const Network neg = to_valuation_network(d);
    CHECK(neg.tables.at(v).at({{w, 1}, {b, 0}, {v, 1}}) == -50.0);

    InfluenceDiagram s;
    const VarId a = s.add_chance("A", {"0", "1"});
    const VarId dec = s.add_decision("D", {"x"});
    const VarId val = s.add_value("V");
    s.add_arc(a, val);
    s.set_cpt(a, {}, {0.5, 0.5});
    s.set_value_table(val, {a}, {1, 2});
    s.set_decision_order({dec});
    const Network small = to_valuation_network(s, {.prune = false});
    CHECK(small.tables.at(val).cardinalities() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("merge_values: sum and product") {
    InfluenceDiagram d;
    const VarId s1 = d.add_chance("S1", {"0", "1"});
    const VarId d1 = d.add_decision("D1", {"x", "y"});
    const VarId s2 = d.add_chance("S2", {"0", "1"});
    const VarId d2 = d.add_decision("D2", {"x", "y"});
    const VarId v1 = d.add_value("V1");
    const VarId v2 = d.add_value("V2");
    for (auto [p, c] : std::vector<std::pair<VarId, VarId>>{
             {s1, d1}, {d1, s2}, {s1, d2}, {d1, d2}, {s2, d2}, {s1, v1}, {d1, v1}, {s2, v2}, {d2, v2}}) {
        d.add_arc(p, c);
    }
    d.set_cpt(s1, {}, {0.3, 0.7});
    d.set_cpt(s2, {d1}, {0.6, 0.4, 0.1, 0.9});
    d.set_value_table(v1, {s1, d1}, {1, 2, 3, 4});
    d.set_value_table(v2, {s2, d2}, {10, 20, 30, 40});
    d.set_combination(Combination::sum);
    d.set_decision_order({d1, d2});
    REQUIRE(validate(d).ok());

    const auto m = merge_values(d);
    REQUIRE(m.value_nodes().size() == 1);
    const Factor& t = *m.value_table(m.value_nodes()[0]);
    CHECK(t.size() == 16);
    for (ConfigCounter c({2, 2, 2, 2}); !c.done(); c.next()) {
        Assignment a{{s1, c.digits()[0]}, {d1, c.digits()[1]}, {s2, c.digits()[2]}, {d2, c.digits()[3]}};
        const double expect = d.value_table(v1)->at(a) + d.value_table(v2)->at(a);
        Assignment ma;
        for (auto [v, o] : a) ma[m.index_of(d.variable(v).id)] = o;
        CHECK(t.at(ma) == expect);
    }

    d.set_combination(Combination::product);
    d.set_value_table(v1, {s1, d1}, {1, 1, 1, 1});
    d.set_value_table(v2, {s2, d2}, {1, 1, 1, 1});
    const auto p = merge_values(d);
    for (double x : p.value_table(p.value_nodes()[0])->values()) CHECK(x == 1.0);

    d.set_value_table(v2, {s2, d2}, {1, -1, 1, 1});
    try {
        (void)merge_values(d);
        FAIL("expected NEGATIVE_FACTOR");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::negative_factor);
    }
}

TEST_CASE("merged MDP has the summed expected value") {
    // Oracle on the merged diagram vs the sum of local expected values under
    // the same (merged-optimal) policy, the latter by direct enumeration.
    const auto d = fixtures::mdp_chain(2);
    const auto m = merge_values(d);
    const auto best = brute_solve(m);
    const double merged = expected_value(m, best.optimal.front()).ev;
    CHECK_THAT(merged, WithinAbs(best.mev, 1e-9));

    double summed = 0.0;
    for (VarId v : d.value_nodes()) {
        InfluenceDiagram single = d;
        for (VarId other : d.value_nodes()) {
            if (other != v) {
                single.set_value_table(other, d.value_table(other)->scope(),
                                       std::vector<double>(d.value_table(other)->size(), 0.0));
            }
        }
        summed += expected_value(single, best.optimal.front()).ev;
    }
    CHECK_THAT(summed, WithinAbs(best.mev, 1e-9));
    CHECK_THAT(brute_solve(d).mev, WithinAbs(best.mev, 1e-9));
}

TEST_CASE("property: rescaled MEV inverts the utility scale") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 60; ++trial) {
        const auto d = fixtures::random_diagram(rng);
        const auto r = solve_by_queries(d);
        if (r.diagnostics.degenerate) continue;
        REQUIRE(r.meu.has_value());
        const Network net = to_belief_network(d);
        CHECK_THAT(r.mev, WithinAbs(net.scale->unscale(*r.meu), 1e-9));
    }
}

TEST_CASE("full-information flag restores every observed parent") {
    const auto d = fixtures::umbrella_tv();
    const Network rel = to_belief_network(d);
    const Network full = to_belief_network(d, {.prune = true, .full_information = true});
    const std::size_t bi = rel.decision_index(d.index_of("Bring Umbrella"));
    CHECK(rel.decision_scopes[bi].size() == 2);
    CHECK(full.decision_scopes[bi] == full.information_sets[bi]);
}
