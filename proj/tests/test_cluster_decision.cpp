#include <catch_amalgamated.hpp>

#include <random>

#include "idsolve/cluster_decision.hpp"
#include "idsolve/fixtures.hpp"
#include "idsolve/oracle.hpp"
#include "support.hpp"

using namespace idsolve;
using Catch::Matchers::WithinAbs;

namespace {

const Encoding kModes[] = {Encoding::rescaled_utility, Encoding::valuation, Encoding::likelihood};

std::vector<InfluenceDiagram> named_fixtures() {
    return {fixtures::umbrella(), fixtures::umbrella_tv(), fixtures::umbrella_tv(false), fixtures::mdp_chain(2),
            fixtures::mdp_chain(3)};
}

bool on_path_to_root(const RootedClusterTree& t, std::size_t from, std::size_t to) {
    for (std::size_t c = from; c != ClusterTree::npos; c = t.child[c]) {
        if (c == to) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("decision_from_cluster: umbrella BF potential") {
    const auto d = fixtures::umbrella();
    const VarId f = d.index_of("Forecast"), b = d.index_of("Bring Umbrella");
    // Psi_BF(b, f) = sum_w P(w) P(f|w) u(w, b), axes (B, F).
    const double pw[2] = {0.7, 0.3};
    const double pf[2][2] = {{0.85, 0.15}, {0.2, 0.8}};
    const double sat[2][2] = {{1.0, 0.8}, {0.0, 0.7}};
    std::vector<double> psi;
    for (std::size_t bi = 0; bi < 2; ++bi) {
        for (std::size_t fi = 0; fi < 2; ++fi) {
            double s = 0.0;
            for (std::size_t wi = 0; wi < 2; ++wi) s += pw[wi] * pf[wi][fi] * sat[wi][bi];
            psi.push_back(s);
        }
    }
    const auto rule = decision_from_cluster(Factor({b, f}, {2, 2}, psi), b, {f});
    CHECK(rule.choice == std::vector<std::size_t>{0, 1});

    const auto flat = decision_from_cluster(Factor::filled({b, f}, {2, 2}, 0.3), b, {f});
    CHECK(flat.choice == std::vector<std::size_t>{0, 0});
}

TEST_CASE("decision_from_cluster: valuation slice") {
    // Axes (R, D, V): V=0 rows are probabilities, V=1 rows probability times value.
    const VarId r = 0, dec = 1, v = 2;
    Factor pot({r, dec, v}, {2, 2, 2}, {0.2, -1.0, 0.2, 3.0, 0.0, 0.0, 0.0, 0.0});
    const auto rule = decision_from_cluster(pot, dec, {r}, v);
    CHECK(rule.choice == std::vector<std::size_t>{1, 0});
    CHECK(rule.zero_rows == std::vector<std::size_t>{1});

    Factor bad({r, dec, v}, {2, 2, 2}, {-0.5, 1.0, 0.2, 3.0, 0.1, 0.0, 0.1, 0.0});
    try {
        (void)decision_from_cluster(bad, dec, {r}, v);
        FAIL("expected NEGATIVE_WEIGHT");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::negative_weight);
    }
}

TEST_CASE("solve_by_clustering: fixtures in every mode") {
    for (const auto& d : named_fixtures()) {
        const auto oracle = brute_solve(d);
        for (Encoding mode : kModes) {
            const auto r = solve_by_clustering(d, {.mode = mode});
            INFO(d.variable(d.decision_order()[0]).id << " " << to_string(mode));
            CHECK_THAT(r.mev, WithinAbs(oracle.mev, 1e-9));
            CHECK_THAT(expected_value(d, r.policy).ev, WithinAbs(oracle.mev, 1e-9));
            CHECK_THAT(r.evidence_probability, WithinAbs(oracle.evidence_probability, 1e-12));
            CHECK(r.diagnostics.backend == "cluster-" + std::string(to_string(mode)));
        }
    }
}

TEST_CASE("solve_by_clustering: shifted values in valuation mode") {
    const auto d = fixtures::umbrella();
    const auto shifted = fixtures::affine_values(d, 1.0, -50.0);
    const auto rescaled = solve_by_clustering(d, {.mode = Encoding::rescaled_utility});
    const auto val = solve_by_clustering(shifted, {.mode = Encoding::valuation});
    CHECK(val.policy.rules[0].choice == rescaled.policy.rules[0].choice);
    CHECK_THAT(val.mev, WithinAbs(rescaled.mev - 50.0, 1e-9));
}

TEST_CASE("solve_by_clustering: likelihood mode without evidence") {
    const auto d = fixtures::umbrella();
    const auto r = solve_by_clustering(d, {.mode = Encoding::likelihood});
    CHECK(r.evidence_probability == 1.0);
    CHECK_THAT(r.mev, WithinAbs(84.7, 1e-9));
}

TEST_CASE("one-directional tree: umbrella in both Value placements") {
    const auto d = fixtures::umbrella();
    for (bool everywhere : {false, true}) {
        const Network net = to_valuation_network(d);
        const auto t = build_one_directional_tree(net, {.value_everywhere = everywhere});
        CHECK(check_one_directional(t).empty());
        CHECK(t.tree.clusters[t.root] == std::vector<VarId>{*net.value_var});
        std::size_t with_value = 0;
        for (const auto& c : t.tree.clusters) with_value += std::count(c.begin(), c.end(), *net.value_var);
        if (everywhere) CHECK(with_value == t.tree.size());
    }
}

TEST_CASE("one-directional tree: two decisions in reverse order") {
    const auto d = fixtures::umbrella_tv();
    const Network net = to_valuation_network(d);
    const auto t = build_one_directional_tree(net);
    REQUIRE(check_one_directional(t).empty());
    const std::size_t tv = net.decision_index(d.index_of("TV Station"));
    const std::size_t bring = net.decision_index(d.index_of("Bring Umbrella"));
    const auto& bc = t.tree.clusters[t.decision_cluster[bring]];
    for (const char* id : {"TV Station", "Forecast", "Bring Umbrella"}) {
        CHECK(std::count(bc.begin(), bc.end(), d.index_of(id)) == 1);
    }
    const auto& tc = t.tree.clusters[t.decision_cluster[tv]];
    CHECK(std::count(tc.begin(), tc.end(), d.index_of("TV Station")) == 1);
    CHECK(t.decision_cluster[bring] != t.decision_cluster[tv]);
    CHECK(on_path_to_root(t, t.decision_cluster[bring], t.decision_cluster[tv]));
}

TEST_CASE("one-directional tree: smallest instance") {
    InfluenceDiagram d;
    const VarId a = d.add_chance("A", {"0", "1"});
    const VarId v = d.add_value("V");
    d.add_arc(a, v);
    d.set_cpt(a, {}, {0.25, 0.75});
    d.set_value_table(v, {a}, {4, 8});
    REQUIRE(validate(d).ok());
    const auto run = run_one_directional(d);
    CHECK(check_one_directional(run.tree).empty());
    CHECK(run.tree.tree.size() <= 2);
    CHECK(run.tree.tree.clusters[run.tree.root] == std::vector<VarId>{v});
    CHECK_THAT(run.result.mev, WithinAbs(7.0, 1e-12));
}

TEST_CASE("checker flags a broken tree") {
    const auto d = fixtures::umbrella();
    const Network net = to_valuation_network(d);
    auto t = build_one_directional_tree(net);
    REQUIRE(check_one_directional(t).empty());
    auto broken = t;
    // Hang the root under another cluster.
    broken.child[broken.root] = broken.decision_cluster[0];
    CHECK_FALSE(check_one_directional(broken).empty());

    auto reordered = t;
    for (auto& drop : reordered.drops) std::reverse(drop.begin(), drop.end());
    bool mixed = false;
    for (const auto& drop : t.drops) {
        bool has_dec = false, has_chance = false;
        for (VarId x : drop) (net.is_decision(x) ? has_dec : has_chance) = true;
        mixed = mixed || (has_dec && has_chance);
    }
    if (mixed) CHECK_FALSE(check_one_directional(reordered).empty());
}

TEST_CASE("single pass: fixtures agree with the oracle") {
    for (const auto& d : named_fixtures()) {
        const auto oracle = brute_solve(d);
        for (Encoding mode : {Encoding::valuation, Encoding::rescaled_utility}) {
            for (bool everywhere : {false, true}) {
                const auto run = run_one_directional(d, {.mode = mode, .tree = {.value_everywhere = everywhere}});
                CHECK_THAT(run.result.mev, WithinAbs(oracle.mev, 1e-9));
                CHECK_THAT(expected_value(d, run.result.policy).ev, WithinAbs(oracle.mev, 1e-9));
                CHECK(run.trace.messages == run.tree.tree.edges.size());
                const auto check = verify_single_pass(run.tree, run.net, run.trace);
                CHECK(check.ok);
            }
        }
    }
}

TEST_CASE("single pass: maximize then sum on the way from Bring Umbrella") {
    const auto d = fixtures::umbrella_tv();
    const auto run = run_one_directional(d);
    const std::size_t bring = run.net.decision_index(d.index_of("Bring Umbrella"));
    const std::size_t c = run.tree.decision_cluster[bring];
    const auto& drop = run.tree.drops[c];
    REQUIRE_FALSE(drop.empty());
    CHECK(drop.front() == d.index_of("Bring Umbrella"));
    CHECK(std::find(drop.begin(), drop.end(), d.index_of("Forecast")) != drop.end());
    CHECK(std::find(drop.begin(), drop.end(), d.index_of("TV Station")) == drop.end());
}

TEST_CASE("property: single pass over random suites") {
    std::mt19937_64 rng(61);
    fixtures::RandomSpec spec;
    spec.evidence = true;
    std::size_t rows = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = fixtures::random_diagram(rng, spec);
        const auto oracle = brute_solve(d);
        for (bool everywhere : {false, true}) {
            const auto run = run_one_directional(d, {.tree = {.value_everywhere = everywhere}});
            CHECK(check_one_directional(run.tree).empty());
            CHECK(run.trace.messages == run.tree.tree.edges.size());
            const auto check = verify_single_pass(run.tree, run.net, run.trace);
            INFO(check.detail);
            CHECK(check.ok);
            rows += check.rows_compared;
            CHECK_THAT(run.result.mev, WithinAbs(oracle.mev, 1e-9));
            CHECK_THAT(expected_value(d, run.result.policy).ev, WithinAbs(oracle.mev, 1e-9));
            // Decisions are maximized before any chance variable in a message.
            for (const auto& drop : run.tree.drops) {
                bool chance_seen = false;
                for (VarId x : drop) {
                    if (run.net.is_decision(x)) CHECK_FALSE(chance_seen);
                    else chance_seen = true;
                }
            }
        }
        for (Encoding mode : kModes) {
            const auto r = solve_by_clustering(d, {.mode = mode});
            CHECK_THAT(r.mev, WithinAbs(oracle.mev, 1e-9));
        }
    }
    CHECK(rows > 500);
}

TEST_CASE("property: root sums give P(E) and the MEV") {
    std::mt19937_64 rng(62);
    fixtures::RandomSpec spec;
    spec.evidence = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = fixtures::random_diagram(rng, spec);
        const auto run = run_one_directional(d, {.transform = {.prune = false}});
        REQUIRE(run.result.diagnostics.root_v0.has_value());
        const double v0 = *run.result.diagnostics.root_v0;
        const double v1 = *run.result.diagnostics.root_v1;
        CHECK_THAT(v0, WithinAbs(support::evidence_probability(d), 1e-12));
        CHECK_THAT(v1 / v0, WithinAbs(brute_solve(d).mev, 1e-9));
    }
}

TEST_CASE("rooted tree DOT marks max and sum") {
    const auto d = fixtures::umbrella_tv();
    const auto run = run_one_directional(d);
    const std::string dot = to_dot(run.tree, run.net);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("max Bring Umbrella") != std::string::npos);
}
