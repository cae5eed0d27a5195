#pragma once

#include <cstdint>
#include <random>

#include "idsolve/model.hpp"

namespace idsolve::fixtures {

/// Weather -> Forecast -> Bring Umbrella; Satisfaction(Weather, Bring
/// Umbrella) = {sun,leave: 100, sun,take: 80, rain,leave: 0, rain,take: 70}.
InfluenceDiagram umbrella();

/// Umbrella problem with a TV Station choice ahead of the umbrella choice.
/// Forecast depends on Weather and TV Station. When `newspaper_observed`,
/// Newspaper (a child of Weather) is evidence "rainy" and both decisions see
/// it; otherwise it is a childless, unobserved node.
InfluenceDiagram umbrella_tv(bool newspaper_observed = true);

/// Finite-horizon MDP: State 1 .. State n+1, Decision i observing the whole
/// history, Value i(Decision i, State i+1) in [0, 10], combined by `c`.
/// Tables are drawn from `seed`.
InfluenceDiagram mdp_chain(std::size_t periods, Combination c = Combination::sum, std::uint64_t seed = 7);

struct RandomSpec {
    std::size_t min_chance = 2;
    std::size_t max_chance = 5;
    std::size_t min_decisions = 1;
    std::size_t max_decisions = 2;
    std::size_t max_alternatives = 3;
    std::size_t max_parents = 2;
    /// Every CPT entry is at least this.
    double min_probability = 0.01;
    double value_lo = -10.0;
    double value_hi = 10.0;
    /// Observe one chance variable that no decision influences, when possible.
    bool evidence = false;
};

/// Random valid diagram: binary chance variables, decisions in creation
/// order with no-forgetting arcs, one value node over one to three
/// attributes.
InfluenceDiagram random_diagram(std::mt19937_64& rng, const RandomSpec& spec = {});

/// Random belief network of `n` binary chance variables (no value node).
InfluenceDiagram random_network(std::mt19937_64& rng, std::size_t n, std::size_t max_parents = 2,
                                double min_probability = 0.01);

/// Same diagram with every value entry mapped to alpha * v + beta.
InfluenceDiagram affine_values(const InfluenceDiagram& d, double alpha, double beta);

}  // namespace idsolve::fixtures
