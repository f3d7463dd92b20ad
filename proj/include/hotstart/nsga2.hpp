#pragma once

// NSGA-II over continuous pursuer placements. A genome is the concatenation
// of (x, y, vx, vy) per pursuer; fitness is the minimisation-sense objective
// vector of the configuration's aggregated features.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hotstart/gfs.hpp"
#include "hotstart/random.hpp"

namespace hotstart {

struct Nsga2Params {
    int population_size = 500;
    int generations = 200;
    double crossover_prob = 0.9;
    double sbx_eta = 15.0;
    double mutation_eta = 20.0;
    // Non-positive selects 1 / genome length.
    double mutation_prob = 0.0;
    double capture_radius = 0.1;
    // Bound on each velocity component and on the speed.
    double speed_cap = 1.0;

    void validate() const {
        if (population_size < 4 || population_size % 2 != 0)
            throw ConfigError("NSGA-II population size must be even and >= 4");
        if (generations < 1) throw ConfigError("NSGA-II needs at least one generation");
        if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("crossover probability must lie in [0, 1]");
        if (!(sbx_eta > 0.0) || !(mutation_eta > 0.0)) throw ConfigError("distribution indices must be positive");
        if (!(capture_radius > 0.0) || !(speed_cap > 0.0)) throw ConfigError("capture radius and speed cap must be positive");
    }
};

struct Nsga2Result {
    ParetoFront front;               // rank 0 of the final population
    ParetoFront initial_front;       // rank 0 of the evaluated initial population
    std::vector<FrontMember> final_population;
    std::vector<FrontMember> last_combined;  // parents and children of the last generation
};

namespace nsga2_detail {

struct Individual {
    std::vector<double> genome;
    FrontMember member;
    std::array<double, 3> objectives{};
    int rank = 0;
    double crowding = 0.0;
};

struct Bounds {
    std::vector<double> lo, hi;
};

inline Bounds genome_bounds(int n_pursuers, double speed_cap) {
    Bounds b;
    for (int i = 0; i < n_pursuers; ++i) {
        b.lo.insert(b.lo.end(), {kWorldMin, kWorldMin, -speed_cap, -speed_cap});
        b.hi.insert(b.hi.end(), {kWorldMax, kWorldMax, speed_cap, speed_cap});
    }
    return b;
}

inline Configuration decode(const std::vector<double>& g, GameType game, const Nsga2Params& p) {
    Configuration c;
    c.game_type = game;
    c.capture_radius = p.capture_radius;
    for (std::size_t k = 0; k + 3 < g.size(); k += 4) {
        AgentState a;
        a.position = clamp_world(Vec2{g[k], g[k + 1]});
        a.velocity = {g[k + 2], g[k + 3]};
        const double s = norm(a.velocity);
        if (s > p.speed_cap) a.velocity *= p.speed_cap / s;
        c.pursuers.push_back(a);
    }
    return c;
}

inline void evaluate(Individual& ind, GameType game, const EvaderSamples& samples, const Nsga2Params& p) {
    ind.member.config = decode(ind.genome, game, p);
    ind.member.features = aggregate_features(ind.member.config, samples);
    const auto& f = ind.member.features;
    if (std::abs(f.capture + f.distance + f.heading - 1.0) > 1e-9)
        throw std::logic_error("aggregated features do not sum to one");
    ind.objectives = f.objectives();
}

// Deb's fast non-dominated sort; returns fronts of indices and sets ranks.
inline std::vector<std::vector<std::size_t>> sort_fronts(std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates_objectives(pop[i].objectives, pop[j].objectives)) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (dominates_objectives(pop[j].objectives, pop[i].objectives)) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (count[i] == 0) {
            pop[i].rank = 0;
            fronts[0].push_back(i);
        }
    for (std::size_t f = 0; !fronts[f].empty(); ++f) {
        std::vector<std::size_t> next;
        for (std::size_t i : fronts[f])
            for (std::size_t j : dominated[i])
                if (--count[j] == 0) {
                    pop[j].rank = static_cast<int>(f) + 1;
                    next.push_back(j);
                }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

inline void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i : front) pop[i].crowding = 0.0;
    if (front.size() <= 2) {
        for (std::size_t i : front) pop[i].crowding = inf;
        return;
    }
    std::vector<std::size_t> order(front);
    for (std::size_t k = 0; k < 3; ++k) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].objectives[k] < pop[b].objectives[k]; });
        const double lo = pop[order.front()].objectives[k];
        const double hi = pop[order.back()].objectives[k];
        pop[order.front()].crowding = inf;
        pop[order.back()].crowding = inf;
        if (hi - lo <= 0.0) continue;
        for (std::size_t m = 1; m + 1 < order.size(); ++m)
            pop[order[m]].crowding += (pop[order[m + 1]].objectives[k] - pop[order[m - 1]].objectives[k]) / (hi - lo);
    }
}

inline bool crowded_less(const Individual& a, const Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
}

inline const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
    const auto& a = pop[uniform_index(rng, pop.size())];
    const auto& b = pop[uniform_index(rng, pop.size())];
    return crowded_less(b, a) ? b : a;
}

// Bounded simulated binary crossover.
inline void sbx(std::vector<double>& c1, std::vector<double>& c2, const Bounds& bounds, const Nsga2Params& p,
                Rng& rng) {
    if (uniform01(rng) > p.crossover_prob) return;
    for (std::size_t k = 0; k < c1.size(); ++k) {
        if (uniform01(rng) > 0.5) continue;
        double y1 = std::min(c1[k], c2[k]);
        double y2 = std::max(c1[k], c2[k]);
        if (y2 - y1 < 1e-14) continue;
        const double lo = bounds.lo[k];
        const double hi = bounds.hi[k];
        const double u = uniform01(rng);
        auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(p.sbx_eta + 1.0));
            return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (p.sbx_eta + 1.0))
                                    : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (p.sbx_eta + 1.0));
        };
        const double bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
        const double bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
        double o1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), lo, hi);
        double o2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), lo, hi);
        if (uniform01(rng) <= 0.5) std::swap(o1, o2);
        c1[k] = o1;
        c2[k] = o2;
    }
}

// Bounded polynomial mutation.
inline void mutate(std::vector<double>& g, const Bounds& bounds, const Nsga2Params& p, Rng& rng) {
    const double prob = p.mutation_prob > 0.0 ? p.mutation_prob : 1.0 / static_cast<double>(g.size());
    const double power = 1.0 / (p.mutation_eta + 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (uniform01(rng) > prob) continue;
        const double lo = bounds.lo[k];
        const double hi = bounds.hi[k];
        const double span = hi - lo;
        const double d1 = (g[k] - lo) / span;
        const double d2 = (hi - g[k]) / span;
        const double u = uniform01(rng);
        double dq;
        if (u < 0.5) {
            const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, p.mutation_eta + 1.0);
            dq = std::pow(v, power) - 1.0;
        } else {
            const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, p.mutation_eta + 1.0);
            dq = 1.0 - std::pow(v, power);
        }
        g[k] = std::clamp(g[k] + dq * span, lo, hi);
    }
}

inline ParetoFront rank_zero(const std::vector<Individual>& pop, GameType game) {
    ParetoFront f;
    f.game_type = game;
    for (const auto& ind : pop)
        if (ind.rank == 0) f.members.push_back(ind.member);
    return f;
}

} // namespace nsga2_detail

inline Nsga2Result nsga2_optimize(GameType game, const EvaderSamples& samples, const Nsga2Params& params,
                                  std::uint64_t seed) {
    using namespace nsga2_detail;
    params.validate();
    if (!game.valid()) throw ConfigError("unsupported game type " + game.name());
    if (samples.empty()) throw ConfigError("NSGA-II needs at least one evader sample");

    Rng rng(seed);
    const Bounds bounds = genome_bounds(game.pursuers, params.speed_cap);
    const std::size_t n = static_cast<std::size_t>(params.population_size);

    std::vector<Individual> pop(n);
    for (auto& ind : pop) {
        ind.genome.resize(bounds.lo.size());
        for (std::size_t k = 0; k < ind.genome.size(); ++k) ind.genome[k] = uniform(rng, bounds.lo[k], bounds.hi[k]);
        evaluate(ind, game, samples, params);
    }
    for (const auto& f : sort_fronts(pop)) assign_crowding(pop, f);

    Nsga2Result result;
    result.initial_front = rank_zero(pop, game);

    for (int gen = 0; gen < params.generations; ++gen) {
        std::vector<Individual> combined = pop;
        combined.reserve(2 * n);
        while (combined.size() < 2 * n) {
            Individual c1, c2;
            c1.genome = tournament(pop, rng).genome;
            c2.genome = tournament(pop, rng).genome;
            sbx(c1.genome, c2.genome, bounds, params, rng);
            mutate(c1.genome, bounds, params, rng);
            mutate(c2.genome, bounds, params, rng);
            evaluate(c1, game, samples, params);
            evaluate(c2, game, samples, params);
            combined.push_back(std::move(c1));
            combined.push_back(std::move(c2));
        }

        const auto fronts = sort_fronts(combined);
        std::vector<Individual> next;
        next.reserve(n);
        for (const auto& f : fronts) {
            assign_crowding(combined, f);
            if (next.size() + f.size() <= n) {
                for (std::size_t i : f) next.push_back(combined[i]);
                continue;
            }
            std::vector<std::size_t> last(f);
            std::stable_sort(last.begin(), last.end(),
                             [&](std::size_t a, std::size_t b) { return combined[a].crowding > combined[b].crowding; });
            for (std::size_t i : last) {
                if (next.size() == n) break;
                next.push_back(combined[i]);
            }
            break;
        }
        if (gen + 1 == params.generations) {
            result.last_combined.clear();
            for (const auto& ind : combined) result.last_combined.push_back(ind.member);
        }
        pop = std::move(next);
        for (const auto& f : sort_fronts(pop)) assign_crowding(pop, f);
    }

    result.front = rank_zero(pop, game);
    for (const auto& ind : pop) result.final_population.push_back(ind.member);
    return result;
}

} // namespace hotstart
