#include <catch_amalgamated.hpp>

#include <random>

#include "idsolve/fixtures.hpp"
#include "idsolve/inference.hpp"
#include "support.hpp"

using namespace idsolve;
using Catch::Matchers::WithinAbs;

namespace {

bool families_covered(const ClusterTree& t, const std::vector<std::vector<VarId>>& families) {
    for (const auto& f : families) {
        if (t.smallest_covering(f) == ClusterTree::npos) return false;
    }
    return true;
}

struct Plain {
    std::vector<std::vector<VarId>> families;
    std::vector<Factor> tables;
    std::vector<std::size_t> cards;
};

Plain plain(const InfluenceDiagram& d) {
    Plain p;
    for (const auto& [v, f] : d.cpts()) {
        p.families.push_back(f.scope());
        p.tables.push_back(f);
    }
    for (const auto& v : d.variables()) p.cards.push_back(v.cardinality());
    return p;
}

}  // namespace

TEST_CASE("chain A -> B -> C") {
    std::vector<std::vector<VarId>> fams{{0}, {0, 1}, {1, 2}};
    auto t = build_cluster_tree(fams, {2, 2, 2});
    REQUIRE(t.size() == 2);
    CHECK(t.clusters[0] == std::vector<VarId>{0, 1});
    CHECK(t.clusters[1] == std::vector<VarId>{1, 2});
    REQUIRE(t.edges.size() == 1);
    CHECK(t.edges[0].separator == std::vector<VarId>{1});
    CHECK(has_running_intersection(t));
}

TEST_CASE("umbrella belief network with the decision family") {
    const auto d = fixtures::umbrella();
    const Network net = to_belief_network(d);
    const VarId w = d.index_of("Weather"), f = d.index_of("Forecast"), b = d.index_of("Bring Umbrella"),
                u = d.index_of("Satisfaction");
    std::vector<std::vector<VarId>> cons{{f, b}};
    auto t = build_cluster_tree(net, cons);
    CHECK(has_running_intersection(t));
    CHECK(is_tree(t));
    std::vector<VarId> uwb{u, w, b}, bf{b, f};
    std::sort(uwb.begin(), uwb.end());
    std::sort(bf.begin(), bf.end());
    CHECK(t.smallest_covering(uwb) != ClusterTree::npos);
    CHECK(t.smallest_covering(bf) != ClusterTree::npos);

    std::vector<std::vector<VarId>> fams;
    for (const auto& [v, tab] : net.tables) fams.push_back(tab.scope());
    CHECK(families_covered(t, fams));
}

TEST_CASE("two-decision network keeps the decision families together") {
    const auto d = fixtures::umbrella_tv();
    const Network net = to_belief_network(d, {.prune = false});
    const VarId t = d.index_of("TV Station"), f = d.index_of("Forecast"), b = d.index_of("Bring Umbrella"),
                n = d.index_of("Newspaper"), w = d.index_of("Weather");
    std::vector<std::vector<VarId>> cons;
    for (std::size_t i = 0; i < net.decisions.size(); ++i) {
        cons.push_back(net.decision_scopes[i]);
        cons.back().push_back(net.decisions[i]);
    }
    auto tree = build_cluster_tree(net, cons);
    CHECK(has_running_intersection(tree));
    std::vector<VarId> tfb{t, f, b}, nw{n, w};
    std::sort(tfb.begin(), tfb.end());
    std::sort(nw.begin(), nw.end());
    CHECK(tree.smallest_covering(tfb) != ClusterTree::npos);
    CHECK(tree.smallest_covering(nw) != ClusterTree::npos);
}

TEST_CASE("hand-built tree UWB - WBF - BF") {
    const auto d = fixtures::umbrella();
    const Network net = to_belief_network(d);
    const VarId w = d.index_of("Weather"), f = d.index_of("Forecast"), b = d.index_of("Bring Umbrella"),
                u = d.index_of("Satisfaction");
    auto sorted = [](std::vector<VarId> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    ClusterTree tree = make_cluster_tree({sorted({u, w, b}), sorted({w, b, f}), sorted({b, f})}, {{0, 1}, {1, 2}},
                                         net.cardinalities());
    CHECK(has_running_intersection(tree));

    SECTION("utility potential times the U=1 indicator") {
        std::vector<Factor> tables{net.tables.at(u)};
        initialize_potentials(tree, tables, {{u, 1}});
        const Factor& psi = tree.potentials[0];
        const double sat[2][2] = {{1.0, 0.8}, {0.0, 0.7}};
        for (std::size_t wi = 0; wi < 2; ++wi) {
            for (std::size_t bi = 0; bi < 2; ++bi) {
                CHECK_THAT(psi.at({{u, 1}, {w, wi}, {b, bi}}), WithinAbs(sat[wi][bi], 1e-15));
                CHECK(psi.at({{u, 0}, {w, wi}, {b, bi}}) == 0.0);
            }
        }
        // Unassigned clusters are all ones.
        for (double x : tree.potentials[2].values()) CHECK(x == 1.0);
    }

    SECTION("collect to BF") {
        std::vector<Factor> tables{net.tables.at(w), net.tables.at(f), net.tables.at(u)};
        initialize_potentials(tree, tables, {{u, 1}});
        auto res = collect(tree, 2);
        CHECK(res.messages == 2);
        const double pw[2] = {0.7, 0.3};
        const double pf[2][2] = {{0.85, 0.15}, {0.2, 0.8}};
        const double sat[2][2] = {{1.0, 0.8}, {0.0, 0.7}};
        for (std::size_t bi = 0; bi < 2; ++bi) {
            for (std::size_t fi = 0; fi < 2; ++fi) {
                double expect = 0.0;
                for (std::size_t wi = 0; wi < 2; ++wi) expect += pw[wi] * pf[wi][fi] * sat[wi][bi];
                CHECK_THAT(res.potential.at({{b, bi}, {f, fi}}), WithinAbs(expect, 1e-12));
            }
        }
    }

    SECTION("P(B, F | U=1) and prior recovery") {
        std::vector<Factor> tables;
        for (const auto& [v, t] : net.tables) tables.push_back(t);
        initialize_potentials(tree, tables, {{u, 1}});
        auto m = marginal(tree, std::vector<VarId>{b, f});
        const double pw[2] = {0.7, 0.3};
        const double pf[2][2] = {{0.85, 0.15}, {0.2, 0.8}};
        const double sat[2][2] = {{1.0, 0.8}, {0.0, 0.7}};
        double joint[2][2] = {{0, 0}, {0, 0}}, total = 0.0;
        for (std::size_t bi = 0; bi < 2; ++bi) {
            for (std::size_t fi = 0; fi < 2; ++fi) {
                for (std::size_t wi = 0; wi < 2; ++wi) joint[bi][fi] += pw[wi] * pf[wi][fi] * 0.5 * sat[wi][bi];
                total += joint[bi][fi];
            }
        }
        CHECK_THAT(m.evidence_probability, WithinAbs(total, 1e-12));
        for (std::size_t bi = 0; bi < 2; ++bi) {
            for (std::size_t fi = 0; fi < 2; ++fi) {
                CHECK_THAT(m.posterior.at({{b, bi}, {f, fi}}), WithinAbs(joint[bi][fi] / total, 1e-12));
            }
        }

        ClusterTree fresh = tree;
        initialize_potentials(fresh, tables);
        auto prior = marginal(fresh, std::vector<VarId>{w});
        CHECK_THAT(prior.posterior[0], WithinAbs(0.7, 1e-12));
        CHECK_THAT(prior.evidence_probability, WithinAbs(1.0, 1e-12));
        for (std::size_t c = 0; c < fresh.size(); ++c) {
            CHECK_THAT(collect(fresh, c).potential.sum(), WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("single cluster collects to its own potential") {
    Factor f({0, 1}, {2, 2}, {0.1, 0.2, 0.3, 0.4});
    ClusterTree t = make_cluster_tree({{0, 1}}, {}, {2, 2});
    std::vector<Factor> tables{f};
    initialize_potentials(t, tables);
    auto r = collect(t, 0);
    CHECK(r.messages == 0);
    CHECK(approx_equal(r.potential, f, 0.0));
}

TEST_CASE("uncovered table") {
    ClusterTree t = make_cluster_tree({{0}, {1}}, {{0, 1}}, {2, 2});
    std::vector<Factor> tables{Factor({0, 1}, {2, 2}, {1, 1, 1, 1})};
    try {
        initialize_potentials(t, tables);
        FAIL("expected UNCOVERED_TABLE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::uncovered_table);
    }
}

TEST_CASE("evidence indicator zeroes the other outcomes") {
    const auto d = fixtures::umbrella();
    const Network net = to_belief_network(d);
    const VarId w = d.index_of("Weather");
    ClusterTree t = make_cluster_tree({{w}}, {}, net.cardinalities());
    std::vector<Factor> tables{net.tables.at(w)};
    initialize_potentials(t, tables, {{w, 1}});
    CHECK(t.potentials[0][0] == 0.0);
    CHECK_THAT(t.potentials[0][1], WithinAbs(0.3, 1e-15));
}

TEST_CASE("property: marginals match full-joint enumeration") {
    std::mt19937_64 rng(41);
    std::size_t queries = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        auto d = fixtures::random_network(rng, n, 1 + rng() % 3, 0.0);
        for (VarId v = 0; v < n; ++v) {
            if (rng() % 4 == 0) d.set_evidence(v, rng() % 2);
        }
        if (support::evidence_probability(d) <= 0.0) continue;
        const VarId x = rng() % n;
        const VarId y = (x + 1 + rng() % (n - 1)) % n;
        std::vector<VarId> pair{std::min(x, y), std::max(x, y)};
        const Plain p = plain(d);
        std::vector<std::vector<VarId>> cons{pair};
        for (auto mode : {EvidenceMode::indicator, EvidenceMode::reduce}) {
            auto t = build_cluster_tree(p.families, p.cards, cons);
            REQUIRE(has_running_intersection(t));
            REQUIRE(is_tree(t));
            REQUIRE(families_covered(t, p.families));
            initialize_potentials(t, p.tables, d.evidence(), mode);
            for (VarId v = 0; v < n; ++v) {
                if (mode == EvidenceMode::reduce && d.is_evidence(v)) continue;
                auto m = marginal(t, std::vector<VarId>{v});
                auto e = support::posterior(d, {v});
                for (std::size_t k = 0; k < 2; ++k) CHECK_THAT(m.posterior[k], WithinAbs(e[k], 1e-12));
                CHECK_THAT(m.evidence_probability, WithinAbs(support::evidence_probability(d), 1e-12));
                ++queries;
            }
            if (mode == EvidenceMode::indicator) {
                auto m = marginal(t, pair);
                auto e = support::posterior(d, pair);
                for (std::size_t k = 0; k < 4; ++k) CHECK_THAT(m.posterior[k], WithinAbs(e[k], 1e-12));
                ++queries;
            }
        }
    }
    CHECK(queries > 500);
}

TEST_CASE("property: collect is invariant to the target") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng() % 4;
        auto d = fixtures::random_network(rng, n, 2, 0.01);
        if (rng() % 2) d.set_evidence(rng() % n, rng() % 2);
        const Plain p = plain(d);
        auto t = build_cluster_tree(p.families, p.cards);
        initialize_potentials(t, p.tables, d.evidence());
        for (std::size_t a = 0; a < t.size(); ++a) {
            auto ra = collect(t, a);
            CHECK(ra.messages == t.edges.size());
            for (std::size_t b = a + 1; b < t.size(); ++b) {
                std::vector<VarId> common;
                std::set_intersection(t.clusters[a].begin(), t.clusters[a].end(), t.clusters[b].begin(),
                                      t.clusters[b].end(), std::back_inserter(common));
                auto rb = collect(t, b);
                auto drop = [&](const Factor& f) {
                    std::vector<VarId> out;
                    for (VarId v : f.scope()) {
                        if (std::find(common.begin(), common.end(), v) == common.end()) out.push_back(v);
                    }
                    return marginalize_sum(f, out);
                };
                CHECK(approx_equal(drop(ra.potential), drop(rb.potential), 1e-12));
            }
        }
    }
}

TEST_CASE("property: every tree built from random diagrams is valid") {
    std::mt19937_64 rng(43);
    fixtures::RandomSpec spec;
    spec.evidence = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = fixtures::random_diagram(rng, spec);
        for (const Network& net : {to_belief_network(d, {.prune = false}), to_valuation_network(d)}) {
            std::vector<std::vector<VarId>> cons;
            for (std::size_t i = 0; i < net.decisions.size(); ++i) {
                cons.push_back(net.decision_scopes[i]);
                cons.back().push_back(net.decisions[i]);
            }
            auto t = build_cluster_tree(net, cons);
            CHECK(has_running_intersection(t));
            std::vector<std::vector<VarId>> fams;
            for (const auto& [v, tab] : net.tables) fams.push_back(tab.scope());
            CHECK(families_covered(t, fams));
            CHECK(families_covered(t, cons));
        }
    }
}

TEST_CASE("evidence probability of a network") {
    const auto d = fixtures::umbrella_tv();
    CHECK_THAT(evidence_probability(to_belief_network(d)), WithinAbs(0.35, 1e-12));
    CHECK_THAT(evidence_probability(to_belief_network(d, {.prune = false})), WithinAbs(0.35, 1e-12));
}

TEST_CASE("dot output lists clusters and separators") {
    std::vector<std::vector<VarId>> fams{{0}, {0, 1}, {1, 2}};
    auto t = build_cluster_tree(fams, {2, 2, 2});
    const std::string dot = to_dot(t, [](VarId v) { return std::string(1, static_cast<char>('A' + v)); });
    CHECK(dot.find("graph") != std::string::npos);
    CHECK(dot.find("A B") != std::string::npos);
}
