#pragma once

// Discrete-time, continuous-space 2-D pursuit-evasion world.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotstart/random.hpp"
#include "hotstart/vec2.hpp"

namespace hotstart {

struct AgentState {
    Vec2 position;
    Vec2 velocity;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class GameKind { OneVsMany, ManyVsMany };

inline constexpr int kMinPursuers = 2;
inline constexpr int kMaxPursuers = 5;
inline constexpr int kMinEvaders = 1;
inline constexpr int kMaxEvaders = 5;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct GameType {
    int pursuers = 4;
    int evaders = 2;

    GameKind kind() const { return evaders == 1 ? GameKind::OneVsMany : GameKind::ManyVsMany; }

    bool valid() const {
        return pursuers >= kMinPursuers && pursuers <= kMaxPursuers && evaders >= kMinEvaders &&
               evaders <= kMaxEvaders;
    }

    // "PxE", e.g. "4x2".
    std::string name() const { return std::to_string(pursuers) + "x" + std::to_string(evaders); }

    static GameType parse(const std::string& s) {
        const auto x = s.find_first_of("xXvV");
        if (x == std::string::npos || x == 0 || x + 1 >= s.size())
            throw ConfigError("game type must look like PxE, got '" + s + "'");
        GameType g;
        try {
            std::size_t used = 0;
            g.pursuers = std::stoi(s.substr(0, x), &used);
            if (used != x) throw std::invalid_argument("trailing");
            g.evaders = std::stoi(s.substr(x + 1), &used);
            if (used != s.size() - x - 1) throw std::invalid_argument("trailing");
        } catch (const std::logic_error&) {
            throw ConfigError("game type must look like PxE, got '" + s + "'");
        }
        if (!g.valid())
            throw ConfigError("unsupported game type " + s + " (pursuers 2-5, evaders 1-5)");
        return g;
    }

    friend bool operator==(const GameType&, const GameType&) = default;
    friend auto operator<=>(const GameType&, const GameType&) = default;
};

// The twelve game types evaluated in the experiments: four one-vs-many
// games and eight many-vs-many games with four or five pursuers.
inline std::vector<GameType> standard_game_types() {
    return {{2, 1}, {3, 1}, {4, 1}, {5, 1}, {4, 2}, {4, 3},
            {4, 4}, {4, 5}, {5, 2}, {5, 3}, {5, 4}, {5, 5}};
}

struct Scenario {
    int n_pursuers = 4;
    int n_evaders = 2;
    GameKind kind = GameKind::ManyVsMany;
    double pursuer_speed = 1.0;
    double evader_speed = 0.5;
    double capture_radius = 0.1;
    double dt = 0.05;
    int horizon = 40;

    double speed_ratio() const { return evader_speed / pursuer_speed; }
    GameType game_type() const { return {n_pursuers, n_evaders}; }

    // Defaults per game kind: the evader is faster in one-vs-many (ratio 2),
    // the pursuers are faster in many-vs-many (ratio 1/2).
    static Scenario for_game(GameType g) {
        if (!g.valid()) throw ConfigError("unsupported game type " + g.name());
        Scenario s;
        s.n_pursuers = g.pursuers;
        s.n_evaders = g.evaders;
        s.kind = g.kind();
        if (s.kind == GameKind::OneVsMany) {
            s.pursuer_speed = 0.5;
            s.evader_speed = 1.0;
        }
        return s;
    }

    void validate() const {
        if (!game_type().valid()) throw ConfigError("unsupported game type " + game_type().name());
        if (kind != game_type().kind())
            throw ConfigError("game kind does not match evader count for " + game_type().name());
        if (!(pursuer_speed > 0.0) || !(evader_speed > 0.0)) throw ConfigError("speeds must be positive");
        if (kind == GameKind::OneVsMany && !(speed_ratio() > 1.0))
            throw ConfigError("one-vs-many games need a faster evader (speed ratio > 1)");
        if (kind == GameKind::ManyVsMany && std::abs(speed_ratio() - 0.5) > 1e-12)
            throw ConfigError("many-vs-many games use speed ratio 1/2");
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(capture_radius > 0.0)) throw ConfigError("capture radius must be positive");
        if (horizon < 1) throw ConfigError("horizon must be at least one step");
    }
};

// Explicit Euler step along `heading`, clamped to the arena.
inline AgentState integrate_step(const AgentState& state, double heading, double speed, double dt) {
    const Vec2 dir = from_heading(heading);
    AgentState next;
    next.velocity = speed * dir;
    next.position = clamp_world(state.position + (speed * dt) * dir);
    return next;
}

// Indices (ascending) of evaders within `rho` of at least one pursuer.
inline std::vector<int> detect_captures(std::span<const AgentState> pursuers,
                                        std::span<const AgentState> evaders, double rho) {
    std::vector<int> captured;
    for (std::size_t j = 0; j < evaders.size(); ++j) {
        for (const auto& p : pursuers) {
            if (distance(p.position, evaders[j].position) <= rho) {
                captured.push_back(static_cast<int>(j));
                break;
            }
        }
    }
    return captured;
}

struct WorldView {
    const Scenario& scenario;
    std::span<const AgentState> pursuers;
    std::span<const AgentState> evaders;
    std::span<const char> evader_alive;
    int step = 0;
};

// One direction per agent on the controlled side: a unit vector, or zero to hold still.
using Controls = std::vector<Vec2>;
using Policy = std::function<Controls(const WorldView&, Rng&)>;

struct CaptureEvent {
    int evader = 0;
    int step = 0;
    friend bool operator==(const CaptureEvent&, const CaptureEvent&) = default;
};

struct StepRecord {
    int step = 0;
    std::vector<AgentState> pursuers;
    // Empty after the evader's capture step.
    std::vector<std::optional<AgentState>> evaders;
    std::vector<int> events;
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeLog {
    Scenario scenario;
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    std::vector<CaptureEvent> captures;
    int terminal_step = 0;

    bool operator==(const EpisodeLog& o) const {
        return seed == o.seed && steps == o.steps && captures == o.captures &&
               terminal_step == o.terminal_step;
    }

    // Capture step of evader `j`, if it was caught.
    std::optional<int> capture_step(int j) const {
        for (const auto& c : captures)
            if (c.evader == j) return c.step;
        return std::nullopt;
    }
};

namespace detail {

inline void apply_controls(std::vector<AgentState>& agents, const Controls& controls, double speed,
                           double dt, std::span<const char> active) {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        const Vec2 u = controls[i];
        if (!std::isfinite(u.x) || !std::isfinite(u.y))
            throw std::runtime_error("policy returned a non-finite control");
        if (u.x == 0.0 && u.y == 0.0) {
            agents[i].velocity = {};
            continue;
        }
        agents[i] = integrate_step(agents[i], std::atan2(u.y, u.x), speed, dt);
    }
}

} // namespace detail

inline EpisodeLog run_episode(const Scenario& scenario, const Policy& pursuer_policy,
                              const Policy& evader_policy, std::span<const AgentState> initial_config,
                              std::span<const AgentState> evader_init, std::uint64_t rng_seed) {
    scenario.validate();
    if (static_cast<int>(initial_config.size()) != scenario.n_pursuers)
        throw std::invalid_argument("initial configuration has " + std::to_string(initial_config.size()) +
                                    " pursuers, scenario expects " + std::to_string(scenario.n_pursuers));
    if (static_cast<int>(evader_init.size()) != scenario.n_evaders)
        throw std::invalid_argument("evader initialization has " + std::to_string(evader_init.size()) +
                                    " evaders, scenario expects " + std::to_string(scenario.n_evaders));

    Rng rng(rng_seed);
    std::vector<AgentState> pursuers(initial_config.begin(), initial_config.end());
    std::vector<AgentState> evaders(evader_init.begin(), evader_init.end());
    for (auto& a : pursuers) a.position = clamp_world(a.position);
    for (auto& a : evaders) a.position = clamp_world(a.position);
    std::vector<char> alive(evaders.size(), 1);

    EpisodeLog log;
    log.scenario = scenario;
    log.seed = rng_seed;

    auto record = [&](int step, std::vector<int> events) {
        StepRecord rec;
        rec.step = step;
        rec.pursuers = pursuers;
        rec.evaders.resize(evaders.size());
        for (std::size_t j = 0; j < evaders.size(); ++j) {
            const bool caught_now = std::find(events.begin(), events.end(), static_cast<int>(j)) != events.end();
            if (alive[j] || caught_now) rec.evaders[j] = evaders[j];
        }
        rec.events = std::move(events);
        log.steps.push_back(std::move(rec));
    };

    auto capture_pass = [&](int step) {
        std::vector<int> events;
        for (std::size_t j = 0; j < evaders.size(); ++j) {
            if (!alive[j]) continue;
            for (const auto& p : pursuers) {
                if (distance(p.position, evaders[j].position) <= scenario.capture_radius) {
                    events.push_back(static_cast<int>(j));
                    break;
                }
            }
        }
        for (int j : events) {
            alive[static_cast<std::size_t>(j)] = 0;
            log.captures.push_back({j, step});
        }
        return events;
    };

    auto any_alive = [&] { return std::find(alive.begin(), alive.end(), 1) != alive.end(); };

    int step = 0;
    record(step, capture_pass(step));
    while (any_alive() && step < scenario.horizon) {
        const WorldView view{scenario, pursuers, evaders, alive, step};
        const Controls pc = pursuer_policy(view, rng);
        const Controls ec = evader_policy(view, rng);
        if (pc.size() != pursuers.size() || ec.size() != evaders.size())
            throw std::runtime_error("policy returned the wrong number of controls");
        detail::apply_controls(pursuers, pc, scenario.pursuer_speed, scenario.dt, {});
        detail::apply_controls(evaders, ec, scenario.evader_speed, scenario.dt, alive);
        ++step;
        record(step, capture_pass(step));
    }
    log.terminal_step = step;
    return log;
}

// ---------------------------------------------------------------------------
// Line-oriented JSON: a header line, then one line per step.

inline nlohmann::json scenario_to_json(const Scenario& s) {
    return {{"n_pursuers", s.n_pursuers},
            {"n_evaders", s.n_evaders},
            {"game_kind", s.kind == GameKind::OneVsMany ? "one-vs-many" : "many-vs-many"},
            {"pursuer_speed", s.pursuer_speed},
            {"evader_speed", s.evader_speed},
            {"capture_radius", s.capture_radius},
            {"dt", s.dt},
            {"horizon", s.horizon}};
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s = Scenario::for_game({j.at("n_pursuers").get<int>(), j.at("n_evaders").get<int>()});
    s.pursuer_speed = j.value("pursuer_speed", s.pursuer_speed);
    s.evader_speed = j.value("evader_speed", s.evader_speed);
    s.capture_radius = j.value("capture_radius", s.capture_radius);
    s.dt = j.value("dt", s.dt);
    s.horizon = j.value("horizon", s.horizon);
    if (j.contains("game_kind")) {
        const auto k = j.at("game_kind").get<std::string>();
        if (k == "one-vs-many") s.kind = GameKind::OneVsMany;
        else if (k == "many-vs-many") s.kind = GameKind::ManyVsMany;
        else throw ConfigError("unknown game_kind '" + k + "'");
    }
    s.validate();
    return s;
}

inline nlohmann::json agent_to_json(const AgentState& a) {
    return nlohmann::json::array({a.position.x, a.position.y, a.velocity.x, a.velocity.y});
}

inline AgentState agent_from_json(const nlohmann::json& j) {
    return {{j.at(0).get<double>(), j.at(1).get<double>()}, {j.at(2).get<double>(), j.at(3).get<double>()}};
}

inline std::string episode_to_jsonl(const EpisodeLog& log) {
    std::ostringstream out;
    nlohmann::json header = {{"header",
                              {{"scenario", scenario_to_json(log.scenario)},
                               {"seed", log.seed},
                               {"terminal_step", log.terminal_step}}}};
    out << header.dump() << '\n';
    for (const auto& rec : log.steps) {
        nlohmann::json line;
        line["step"] = rec.step;
        line["pursuers"] = nlohmann::json::array();
        for (const auto& p : rec.pursuers) line["pursuers"].push_back(agent_to_json(p));
        line["evaders"] = nlohmann::json::array();
        for (const auto& e : rec.evaders) line["evaders"].push_back(e ? agent_to_json(*e) : nlohmann::json(nullptr));
        line["events"] = rec.events;
        out << line.dump() << '\n';
    }
    return out.str();
}

inline EpisodeLog episode_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    EpisodeLog log;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.contains("header")) {
            const auto& h = j.at("header");
            log.scenario = scenario_from_json(h.at("scenario"));
            log.seed = h.at("seed").get<std::uint64_t>();
            log.terminal_step = h.at("terminal_step").get<int>();
            have_header = true;
            continue;
        }
        StepRecord rec;
        rec.step = j.at("step").get<int>();
        for (const auto& p : j.at("pursuers")) rec.pursuers.push_back(agent_from_json(p));
        for (const auto& e : j.at("evaders"))
            rec.evaders.push_back(e.is_null() ? std::nullopt : std::optional<AgentState>(agent_from_json(e)));
        rec.events = j.at("events").get<std::vector<int>>();
        for (int ev : rec.events) log.captures.push_back({ev, rec.step});
        log.steps.push_back(std::move(rec));
    }
    if (!have_header) throw std::runtime_error("episode log has no header line");
    return log;
}

} // namespace hotstart
