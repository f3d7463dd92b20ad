#pragma once

// Graph Feature Space: per-pursuer utilities, their aggregation into a point
// on the unit simplex, Pareto dominance, and graph construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotstart/random.hpp"
#include "hotstart/sim.hpp"
#include "hotstart/vec2.hpp"

namespace hotstart {

inline constexpr double kHeadingEps = 1e-9;
inline constexpr double kPairDistanceFloor = 1e-6;
inline constexpr int kNodeFeatures = 10;
inline constexpr int kDefaultEvaderSamples = 32;

struct Configuration {
    std::vector<AgentState> pursuers;
    double capture_radius = 0.1;
    GameType game_type;

    std::vector<Vec2> positions() const {
        std::vector<Vec2> out;
        out.reserve(pursuers.size());
        for (const auto& p : pursuers) out.push_back(p.position);
        return out;
    }
};

// Normalised (capture, distance, heading) utilities; sums to one.
struct FeatureVector {
    double capture = 0.0;
    double distance = 0.0;
    double heading = 0.0;

    std::array<double, 3> values() const { return {capture, distance, heading}; }

    // Minimisation-sense objective vector: capture and heading are maximised.
    std::array<double, 3> objectives() const { return {-capture, distance, -heading}; }

    // Objectives shifted into the unit box, for hypervolume against (1, 1, 1).
    std::array<double, 3> unit_objectives() const { return {1.0 - capture, distance, 1.0 - heading}; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Unnormalised utilities; heading is already divided by pi.
struct RawUtilities {
    double capture = 0.0;
    double distance = 0.0;
    double heading = 0.0;

    RawUtilities& operator+=(const RawUtilities& o) {
        capture += o.capture;
        distance += o.distance;
        heading += o.heading;
        return *this;
    }
    RawUtilities& operator/=(double s) {
        capture /= s;
        distance /= s;
        heading /= s;
        return *this;
    }
};

// Each entry is one hypothetical placement of all evaders.
using EvaderSamples = std::vector<std::vector<Vec2>>;

inline EvaderSamples sample_evaders(int n_evaders, int count, std::uint64_t seed) {
    if (n_evaders < 1 || count < 1) throw std::invalid_argument("evader samples need n_evaders, count >= 1");
    Rng rng(seed);
    EvaderSamples out(static_cast<std::size_t>(count));
    for (auto& s : out) {
        s.reserve(static_cast<std::size_t>(n_evaders));
        for (int k = 0; k < n_evaders; ++k) s.push_back(uniform_in_world(rng));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Utilities

inline double u_capture(double d, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("capture radius must be positive");
    if (d < 0.0) throw std::invalid_argument("distance must be non-negative");
    return 2.0 * (1.0 - 1.0 / (1.0 + std::exp((-d + r) / r)));
}

inline double u_distance(Vec2 p, std::span<const Vec2> evaders) {
    if (evaders.empty()) throw std::invalid_argument("u_distance needs at least one evader");
    double best = std::numeric_limits<double>::infinity();
    for (Vec2 e : evaders) best = std::min(best, distance(p, e));
    return best;
}

// The epsilon only guards a zero norm product. Added unconditionally it would
// bias aligned headings by sqrt(2 eps) ~ 4.5e-5 rad through arccos.
inline double heading_angle(Vec2 velocity, Vec2 p, Vec2 e) {
    const Vec2 r = e - p;
    const double c = dot(velocity, r) / std::max(norm(velocity) * norm(r), kHeadingEps);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// Mean angle (radians) between the pursuer's velocity and each evader direction.
inline double u_heading(Vec2 velocity, Vec2 p, std::span<const Vec2> evaders) {
    if (evaders.empty()) throw std::invalid_argument("u_heading needs at least one evader");
    double sum = 0.0;
    for (Vec2 e : evaders) sum += heading_angle(velocity, p, e);
    return sum / static_cast<double>(evaders.size());
}

// Capture utility of one pursuer against an evader set: mean over evaders.
inline double u_capture_mean(Vec2 p, std::span<const Vec2> evaders, double r) {
    double sum = 0.0;
    for (Vec2 e : evaders) sum += u_capture(distance(p, e), r);
    return sum / static_cast<double>(evaders.size());
}

inline RawUtilities pursuer_utilities(const AgentState& pursuer, const EvaderSamples& samples, double rho) {
    if (samples.empty()) throw std::invalid_argument("need at least one evader sample");
    RawUtilities acc;
    for (const auto& s : samples) {
        if (s.empty()) throw std::invalid_argument("evader samples must be non-empty");
        acc += RawUtilities{u_capture_mean(pursuer.position, s, rho), u_distance(pursuer.position, s),
                            u_heading(pursuer.velocity, pursuer.position, s) / kPi};
    }
    acc /= static_cast<double>(samples.size());
    return acc;
}

inline FeatureVector normalize_utilities(const RawUtilities& u) {
    const double total = u.capture + u.distance + u.heading;
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::domain_error("utility sum is zero; features cannot be normalised");
    return {u.capture / total, u.distance / total, u.heading / total};
}

inline FeatureVector aggregate_features(const Configuration& config, const EvaderSamples& samples) {
    if (config.pursuers.empty()) throw std::invalid_argument("configuration has no pursuers");
    RawUtilities acc;
    for (const auto& p : config.pursuers) acc += pursuer_utilities(p, samples, config.capture_radius);
    acc /= static_cast<double>(config.pursuers.size());
    return normalize_utilities(acc);
}

// ---------------------------------------------------------------------------
// Positions-only configurations. Hot starts carry no velocity, so each
// pursuer is given its full speed toward the arena origin.

inline Vec2 velocity_toward_origin(Vec2 p, double speed) {
    const double n = norm(p);
    return n > 1e-12 ? (-speed / n) * p : Vec2{};
}

inline Configuration configuration_from_positions(std::span<const Vec2> positions, GameType game, double rho,
                                                  double speed) {
    Configuration c;
    c.capture_radius = rho;
    c.game_type = game;
    for (Vec2 p : positions) c.pursuers.push_back({p, velocity_toward_origin(p, speed)});
    return c;
}

// Features of a positions-only configuration and their Jacobian with respect
// to the positions: jacobian[k][2*i + a] = d feature_k / d position_i[a].
struct FeatureJacobian {
    FeatureVector features;
    std::array<std::vector<double>, 3> jacobian;
};

inline FeatureJacobian features_with_jacobian(std::span<const Vec2> positions, double rho, double speed,
                                              const EvaderSamples& samples) {
    const std::size_t n = positions.size();
    if (n == 0) throw std::invalid_argument("configuration has no pursuers");
    if (samples.empty()) throw std::invalid_argument("need at least one evader sample");

    std::array<double, 3> raw{};
    std::array<std::vector<double>, 3> draw;
    for (auto& g : draw) g.assign(2 * n, 0.0);
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(samples.size()));

    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = positions[i];
        const double pn = norm(p);
        const bool has_heading = pn > 1e-12;
        const Vec2 v = velocity_toward_origin(p, speed);
        const Vec2 ph = has_heading ? p / pn : Vec2{};
        for (const auto& s : samples) {
            if (s.empty()) throw std::invalid_argument("evader samples must be non-empty");
            const double inv_m = 1.0 / static_cast<double>(s.size());
            double best = std::numeric_limits<double>::infinity();
            Vec2 best_grad;
            for (Vec2 e : s) {
                const Vec2 r = e - p;
                const double d = norm(r);
                const Vec2 dd = d > 0.0 ? -(r / d) : Vec2{};

                const double z = (rho - d) / rho;
                const double sig = 1.0 / (1.0 + std::exp(-z));
                raw[0] += scale * inv_m * 2.0 * sig;
                const Vec2 gcap = (-2.0 * sig * (1.0 - sig) / rho) * dd;
                draw[0][2 * i] += scale * inv_m * gcap.x;
                draw[0][2 * i + 1] += scale * inv_m * gcap.y;

                if (d < best) {
                    best = d;
                    best_grad = dd;
                }

                const double num = dot(v, r);
                const double den_raw = norm(v) * d;
                const bool guarded = den_raw < kHeadingEps;
                const double den = guarded ? kHeadingEps : den_raw;
                const double c = num / den;
                const double cc = std::clamp(c, -1.0, 1.0);
                raw[2] += scale * inv_m * std::acos(cc) / kPi;
                if (has_heading && std::abs(c) < 1.0 - 1e-12) {
                    // d num/dp = Jv^T r - v with Jv = -speed (I - ph ph^T) / |p|
                    const Vec2 jr = (-speed / pn) * (r - dot(ph, r) * ph);
                    const Vec2 dnum = jr - v;
                    const Vec2 dden = guarded ? Vec2{} : speed * dd;
                    const Vec2 dc = (dnum * den - num * dden) / (den * den);
                    const Vec2 dtheta = (-1.0 / std::sqrt(1.0 - c * c)) * dc;
                    draw[2][2 * i] += scale * inv_m * dtheta.x / kPi;
                    draw[2][2 * i + 1] += scale * inv_m * dtheta.y / kPi;
                }
            }
            raw[1] += scale * best;
            draw[1][2 * i] += scale * best_grad.x;
            draw[1][2 * i + 1] += scale * best_grad.y;
        }
    }

    const double total = raw[0] + raw[1] + raw[2];
    if (!(total > 0.0)) throw std::domain_error("utility sum is zero; features cannot be normalised");
    FeatureJacobian out;
    out.features = {raw[0] / total, raw[1] / total, raw[2] / total};
    for (int k = 0; k < 3; ++k) out.jacobian[k].assign(2 * n, 0.0);
    for (std::size_t q = 0; q < 2 * n; ++q) {
        const double dtotal = draw[0][q] + draw[1][q] + draw[2][q];
        for (int k = 0; k < 3; ++k) out.jacobian[k][q] = (draw[k][q] * total - raw[k] * dtotal) / (total * total);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dominance

inline bool dominates_objectives(std::span<const double> a, std::span<const double> b) {
    bool strict = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strict = true;
    }
    return strict;
}

inline bool dominates(const FeatureVector& a, const FeatureVector& b) {
    const auto oa = a.objectives();
    const auto ob = b.objectives();
    return dominates_objectives(oa, ob);
}

struct FrontMember {
    Configuration config;
    FeatureVector features;
};

struct ParetoFront {
    GameType game_type;
    std::vector<FrontMember> members;

    std::vector<FeatureVector> feature_vectors() const {
        std::vector<FeatureVector> out;
        out.reserve(members.size());
        for (const auto& m : members) out.push_back(m.features);
        return out;
    }
};

// Indices of the non-dominated vectors, in input order. Only a
// lexicographically smaller vector can dominate, and checking against the
// non-dominated prefix suffices by transitivity.
inline std::vector<std::size_t> non_dominated_indices(std::span<const FeatureVector> fv) {
    std::vector<std::size_t> order(fv.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a].objectives() < fv[b].objectives(); });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const bool dominated = std::any_of(kept.begin(), kept.end(),
                                           [&](std::size_t k) { return dominates(fv[k], fv[idx]); });
        if (!dominated) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

inline ParetoFront pareto_front(std::span<const FrontMember> population) {
    if (population.empty()) throw std::invalid_argument("pareto_front needs a non-empty population");
    std::vector<FeatureVector> fv;
    fv.reserve(population.size());
    for (const auto& m : population) fv.push_back(m.features);
    ParetoFront front;
    front.game_type = population.front().config.game_type;
    for (std::size_t i : non_dominated_indices(fv)) front.members.push_back(population[i]);
    return front;
}

// ---------------------------------------------------------------------------
// Graphs

struct GraphEdge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct ConfigGraph {
    GameType game_type;
    std::vector<std::array<double, kNodeFeatures>> nodes;
    // Undirected; each pair stored once with from < to.
    std::vector<GraphEdge> edges;

    int node_count() const { return static_cast<int>(nodes.size()); }
};

// Each pursuer's own utilities, normalised per pursuer.
inline std::vector<FeatureVector> per_pursuer_features(const Configuration& config, const EvaderSamples& samples) {
    std::vector<FeatureVector> out;
    out.reserve(config.pursuers.size());
    for (const auto& p : config.pursuers)
        out.push_back(normalize_utilities(pursuer_utilities(p, samples, config.capture_radius)));
    return out;
}

inline double mean_pairwise_distance(std::span<const Vec2> pts) {
    double sum = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            sum += distance(pts[i], pts[j]);
            ++pairs;
        }
    return pairs ? sum / pairs : 0.0;
}

inline constexpr double kEdgeTolerance = 1e-12;

// Pairs at most the mean pairwise distance apart, weight 1/d.
inline std::vector<GraphEdge> pp_edges(std::span<const Vec2> pts) {
    const double mean = mean_pairwise_distance(pts);
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = distance(pts[i], pts[j]);
            if (d <= mean * (1.0 + kEdgeTolerance) + kEdgeTolerance)
                edges.push_back({static_cast<int>(i), static_cast<int>(j), 1.0 / std::max(d, kPairDistanceFloor)});
        }
    return edges;
}

// Node row: [u_capture, u_distance, u_heading, rho, vx, vy, x, y, noise, noise].
inline ConfigGraph build_graph(const Configuration& config, std::span<const FeatureVector> features, Rng& noise) {
    if (config.pursuers.size() < 2) throw std::invalid_argument("a configuration graph needs at least two pursuers");
    if (features.size() != config.pursuers.size())
        throw std::invalid_argument("need one feature vector per pursuer");
    ConfigGraph g;
    g.game_type = config.game_type;
    for (std::size_t i = 0; i < config.pursuers.size(); ++i) {
        const auto& p = config.pursuers[i];
        const auto& f = features[i];
        const double n1 = uniform01(noise);
        const double n2 = uniform01(noise);
        g.nodes.push_back({f.capture, f.distance, f.heading, config.capture_radius, p.velocity.x, p.velocity.y,
                           p.position.x, p.position.y, n1, n2});
    }
    g.edges = pp_edges(config.positions());
    return g;
}

// ---------------------------------------------------------------------------
// Serialisation

inline nlohmann::json to_json(const FeatureVector& f) {
    return nlohmann::json::array({f.capture, f.distance, f.heading});
}

inline FeatureVector feature_vector_from_json(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline nlohmann::json to_json(const Configuration& c) {
    nlohmann::json p = nlohmann::json::array();
    for (const auto& a : c.pursuers) p.push_back(agent_to_json(a));
    return {{"game_type", c.game_type.name()}, {"capture_radius", c.capture_radius}, {"pursuers", p}};
}

inline Configuration configuration_from_json(const nlohmann::json& j) {
    Configuration c;
    c.game_type = GameType::parse(j.at("game_type").get<std::string>());
    c.capture_radius = j.at("capture_radius").get<double>();
    for (const auto& a : j.at("pursuers")) c.pursuers.push_back(agent_from_json(a));
    return c;
}

inline nlohmann::json to_json(const ParetoFront& f) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : f.members) members.push_back({{"config", to_json(m.config)}, {"features", to_json(m.features)}});
    return {{"game_type", f.game_type.name()}, {"members", members}};
}

inline ParetoFront pareto_front_from_json(const nlohmann::json& j) {
    ParetoFront f;
    f.game_type = GameType::parse(j.at("game_type").get<std::string>());
    for (const auto& m : j.at("members"))
        f.members.push_back({configuration_from_json(m.at("config")), feature_vector_from_json(m.at("features"))});
    return f;
}

inline nlohmann::json to_json(const ConfigGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) edges.push_back(nlohmann::json::array({e.from, e.to, e.weight}));
    return {{"game_type", g.game_type.name()}, {"nodes", g.nodes}, {"edges", edges}};
}

inline ConfigGraph config_graph_from_json(const nlohmann::json& j) {
    ConfigGraph g;
    g.game_type = GameType::parse(j.at("game_type").get<std::string>());
    g.nodes = j.at("nodes").get<std::vector<std::array<double, kNodeFeatures>>>();
    for (const auto& e : j.at("edges")) g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    return g;
}

inline nlohmann::json to_json(const EvaderSamples& s) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& set : s) {
        nlohmann::json pts = nlohmann::json::array();
        for (Vec2 p : set) pts.push_back(nlohmann::json::array({p.x, p.y}));
        out.push_back(pts);
    }
    return out;
}

inline EvaderSamples evader_samples_from_json(const nlohmann::json& j) {
    EvaderSamples out;
    for (const auto& set : j) {
        std::vector<Vec2> pts;
        for (const auto& p : set) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        out.push_back(std::move(pts));
    }
    return out;
}

inline std::string fronts_csv_header() {
    std::string h = "game_type,member,u_capture,u_distance,u_heading";
    for (int i = 0; i < kMaxPursuers; ++i) h += ",p" + std::to_string(i) + "_x,p" + std::to_string(i) + "_y";
    return h + "\n";
}

// One row per member; unused pursuer columns are left empty.
inline std::string fronts_csv_rows(const ParetoFront& f) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t m = 0; m < f.members.size(); ++m) {
        const auto& mem = f.members[m];
        out << f.game_type.name() << ',' << m << ',' << mem.features.capture << ',' << mem.features.distance << ','
            << mem.features.heading;
        for (int i = 0; i < kMaxPursuers; ++i) {
            if (i < static_cast<int>(mem.config.pursuers.size())) {
                const Vec2 p = mem.config.pursuers[static_cast<std::size_t>(i)].position;
                out << ',' << p.x << ',' << p.y;
            } else {
                out << ",,";
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace hotstart
