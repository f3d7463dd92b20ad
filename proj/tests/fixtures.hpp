#pragma once

// Small in-memory GFS datasets shared by the GCN tests and the acceptance run.

#include <cstdint>
#include <map>
#include <vector>

#include "hotstart/gcn.hpp"
#include "hotstart/gfs.hpp"
#include "hotstart/nsga2.hpp"
#include "hotstart/sim.hpp"

namespace hotstart::fixtures {

struct DeskData {
    std::vector<ConfigGraph> graphs;
    std::map<GameType, GameContext> contexts;
};

inline DeskData make_desk_data(const std::vector<GameType>& games, int population, int generations,
                               int evader_samples, std::uint64_t seed) {
    DeskData d;
    for (const GameType g : games) {
        const Scenario s = Scenario::for_game(g);
        const std::uint64_t gs = derive_seed(seed, static_cast<std::uint64_t>(g.pursuers * 10 + g.evaders));
        const EvaderSamples samples = sample_evaders(g.evaders, evader_samples, derive_seed(gs, 1));
        Nsga2Params p;
        p.population_size = population;
        p.generations = generations;
        p.capture_radius = s.capture_radius;
        p.speed_cap = s.pursuer_speed;
        const ParetoFront front = nsga2_optimize(g, samples, p, derive_seed(gs, 2)).front;
        Rng noise(derive_seed(gs, 3));
        for (const auto& m : front.members)
            d.graphs.push_back(build_graph(m.config, per_pursuer_features(m.config, samples), noise));
        d.contexts[g] = {g, samples, front.feature_vectors(), s.capture_radius, s.pursuer_speed};
    }
    return d;
}

} // namespace hotstart::fixtures
