#pragma once

// Control laws.
//
// One evader vs. many pursuers: the evader heads for the weakest link between
// two pursuers; each pursuer steers at an interception aim point and freezes
// once it is within the capture radius.
//
// Many vs. many: pursuers are matched to evaders with the Hungarian method on
// a cost that blends distance with the value grid, then steer along a blend of
// the direct line to their target and the descending value gradient. Evaders
// ascend the value gradient while pushing away from nearby pursuers.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hotstart/hungarian.hpp"
#include "hotstart/sim.hpp"
#include "hotstart/value_grid.hpp"
#include "hotstart/vec2.hpp"

namespace hotstart {

inline constexpr double kWeakLinkGuard = 1e-6;

namespace detail {

inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

struct PursuerSighting {
    double dist;
    double phi;
    double los;  // bearing from the evader to the pursuer
};

inline PursuerSighting sight(Vec2 evader, Vec2 pursuer) {
    PursuerSighting s;
    const Vec2 r = pursuer - evader;
    s.dist = norm(r);
    const double d2 = s.dist * s.dist;
    s.phi = d2 > 1.0 ? std::acos(std::clamp((1.0 - d2) / (2.0 * s.dist), -1.0, 1.0)) : 0.0;
    s.los = std::atan2(r.y, r.x);
    return s;
}

} // namespace detail

struct WeakestLink {
    int first = -1;
    int second = -1;
    double theta = std::numeric_limits<double>::infinity();
};

// Pair (i < j) minimising theta_ij = phi_i + phi_j - (lambda_i - lambda_j).
// The bearing difference is wrapped to (-pi, pi] so the choice does not
// depend on where atan2 places its branch cut.
inline WeakestLink find_weakest_link(Vec2 evader, std::span<const Vec2> pursuers) {
    if (pursuers.size() < 2) throw std::invalid_argument("weakest link needs at least two pursuers");
    std::vector<detail::PursuerSighting> s;
    s.reserve(pursuers.size());
    for (Vec2 p : pursuers) s.push_back(detail::sight(evader, p));
    WeakestLink best;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const double theta = s[i].phi + s[j].phi - detail::wrap_angle(s[i].los - s[j].los);
            if (theta < best.theta) best = {static_cast<int>(i), static_cast<int>(j), theta};
        }
    }
    return best;
}

inline double evader_weakest_link(Vec2 evader, std::span<const Vec2> pursuers) {
    const WeakestLink link = find_weakest_link(evader, pursuers);
    const auto si = detail::sight(evader, pursuers[static_cast<std::size_t>(link.first)]);
    const auto sj = detail::sight(evader, pursuers[static_cast<std::size_t>(link.second)]);
    const double di = std::max(si.dist, kWeakLinkGuard);
    const double dj = std::max(sj.dist, kWeakLinkGuard);
    const double root_i = std::sqrt(std::max(si.dist * si.dist - 2.0, kWeakLinkGuard));
    const double root_j = std::sqrt(std::max(sj.dist * sj.dist - 2.0, kWeakLinkGuard));
    const double psi_s = (std::cos(sj.los) - std::sin(sj.los) / root_j) / dj -
                         (std::cos(si.los) + std::sin(si.los) / root_i) / di;
    const double psi_c = (std::sin(si.los) - std::cos(si.los) / root_i) / di -
                         (std::sin(sj.los) + std::cos(sj.los) / root_j) / dj;
    return std::atan2(psi_s, psi_c);
}

inline double evader_weakest_link(const AgentState& evader, std::span<const AgentState> pursuers) {
    std::vector<Vec2> pos;
    pos.reserve(pursuers.size());
    for (const auto& p : pursuers) pos.push_back(p.position);
    return evader_weakest_link(evader.position, pos);
}

// Heading toward the aim point p + (gamma (e - p) + rho) / (1 - gamma^2).
inline double pursuer_intercept_heading(Vec2 pursuer, Vec2 evader, double gamma, double rho) {
    const double denom = 1.0 - gamma * gamma;
    if (denom == 0.0) throw std::domain_error("interception aim point is singular for speed ratio 1");
    const double ox = (gamma * (evader.x - pursuer.x) + rho) / denom;
    const double oy = (gamma * (evader.y - pursuer.y) + rho) / denom;
    return std::atan2(oy, ox);
}

// Bearing of every evader from every pursuer (rows = pursuers).
inline CostMatrix bearing_angles(std::span<const Vec2> pursuers, std::span<const Vec2> evaders) {
    CostMatrix out(static_cast<int>(pursuers.size()), static_cast<int>(evaders.size()));
    for (std::size_t i = 0; i < pursuers.size(); ++i)
        for (std::size_t j = 0; j < evaders.size(); ++j) {
            const Vec2 d = normalized(evaders[j] - pursuers[i]);
            out(static_cast<int>(i), static_cast<int>(j)) = std::atan2(d.y, d.x);
        }
    return out;
}

// alpha * d_ij + (1 - alpha) * V~(e_j), with the interpolated values min-max
// rescaled onto the observed distance range.
inline CostMatrix hybrid_cost_matrix(std::span<const Vec2> pursuers, std::span<const Vec2> evaders,
                                     const ValueGrid& grid, double alpha) {
    if (evaders.empty()) throw std::invalid_argument("hybrid cost needs at least one evader");
    if (pursuers.empty()) throw std::invalid_argument("hybrid cost needs at least one pursuer");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");

    const int np = static_cast<int>(pursuers.size());
    const int ne = static_cast<int>(evaders.size());
    CostMatrix dist(np, ne);
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -dmin;
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < ne; ++j) {
            dist(i, j) = distance(pursuers[i], evaders[j]);
            dmin = std::min(dmin, dist(i, j));
            dmax = std::max(dmax, dist(i, j));
        }

    std::vector<double> value(static_cast<std::size_t>(ne));
    for (int j = 0; j < ne; ++j) value[j] = grid.bilinear(evaders[j]);
    const auto [vlo, vhi] = std::minmax_element(value.begin(), value.end());
    const double vmin = *vlo;
    const double vrange = *vhi - vmin;
    for (double& v : value)
        v = vrange > 1e-12 ? dmin + (v - vmin) / vrange * (dmax - dmin) : 0.5 * (dmin + dmax);

    CostMatrix cost(np, ne);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < ne; ++j) cost(i, j) = alpha * dist(i, j) + (1.0 - alpha) * value[j];
    return cost;
}

// alpha * u_geometric + (1 - alpha) * u_gradient, renormalised (zero when the
// blend cancels).
inline Vec2 blend_controls(Vec2 geometric, Vec2 gradient, double alpha) {
    return normalized(alpha * geometric + (1.0 - alpha) * gradient);
}

inline Vec2 pursuer_hybrid_control(Vec2 pursuer, Vec2 target, const ValueGrid& grid, double alpha) {
    if (pursuer == target) return {};
    const Vec2 geometric = normalized(target - pursuer);
    const Vec2 gradient = normalized(-upwind_gradient(grid, pursuer, Role::Pursuer));
    return blend_controls(geometric, gradient, alpha);
}

inline constexpr double kAvoidDistanceFloor = 1e-6;

// Sum of (e - p) / |e - p|^2 over pursuers strictly inside the avoidance radius.
inline Vec2 avoidance_vector(Vec2 evader, std::span<const Vec2> pursuers, double avoid_radius) {
    Vec2 a;
    for (Vec2 p : pursuers) {
        const Vec2 r = evader - p;
        const double d = norm(r);
        if (d >= avoid_radius) continue;
        const double df = std::max(d, kAvoidDistanceFloor);
        a += r / (df * df);
    }
    return a;
}

inline Vec2 evader_escape_control(Vec2 evader, std::span<const Vec2> pursuers, const ValueGrid& grid,
                                  double avoid_radius) {
    const Vec2 ascent = normalized(upwind_gradient(grid, evader, Role::Evader));
    const Vec2 avoid = normalized(avoidance_vector(evader, pursuers, avoid_radius));
    return normalized(ascent + avoid);
}

// ---------------------------------------------------------------------------
// Policies usable with run_episode.

struct HybridParams {
    int grid_resolution = 41;
    double alpha = 0.5;
    // Non-positive selects three capture radii.
    double avoid_radius = 0.0;
};

namespace detail {

inline std::vector<Vec2> positions(std::span<const AgentState> agents) {
    std::vector<Vec2> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.position);
    return out;
}

inline std::vector<Vec2> live_positions(const WorldView& view, std::vector<int>* index = nullptr) {
    std::vector<Vec2> out;
    for (std::size_t j = 0; j < view.evaders.size(); ++j) {
        if (!view.evader_alive[j]) continue;
        out.push_back(view.evaders[j].position);
        if (index) index->push_back(static_cast<int>(j));
    }
    return out;
}

} // namespace detail

// Distance field to the live evaders advanced by one HJI step.
inline ValueGrid hybrid_value_grid(const WorldView& view, const HybridParams& params) {
    const auto live = detail::live_positions(view);
    const auto& s = view.scenario;
    ValueGrid grid = distance_field(params.grid_resolution, live, s.capture_radius);
    return hji_update(grid, s.dt, s.pursuer_speed, s.evader_speed);
}

inline Policy weakest_link_evader_policy() {
    return [](const WorldView& view, Rng&) {
        Controls out(view.evaders.size());
        const auto pursuers = detail::positions(view.pursuers);
        for (std::size_t j = 0; j < view.evaders.size(); ++j) {
            if (!view.evader_alive[j]) continue;
            out[j] = from_heading(evader_weakest_link(view.evaders[j].position, pursuers));
        }
        return out;
    };
}

inline Policy intercept_pursuer_policy() {
    return [](const WorldView& view, Rng&) {
        const auto& s = view.scenario;
        Controls out(view.pursuers.size());
        int target = -1;
        for (std::size_t j = 0; j < view.evaders.size(); ++j)
            if (view.evader_alive[j]) { target = static_cast<int>(j); break; }
        if (target < 0) return out;
        const Vec2 e = view.evaders[static_cast<std::size_t>(target)].position;
        for (std::size_t i = 0; i < view.pursuers.size(); ++i) {
            const Vec2 p = view.pursuers[i].position;
            if (distance(p, e) <= s.capture_radius) continue;  // frozen
            out[i] = from_heading(pursuer_intercept_heading(p, e, s.speed_ratio(), s.capture_radius));
        }
        return out;
    };
}

inline Assignment hybrid_assignment(const WorldView& view, const ValueGrid& grid, double alpha,
                                    std::vector<int>* evader_index) {
    const auto pursuers = detail::positions(view.pursuers);
    const auto live = detail::live_positions(view, evader_index);
    return hungarian_assign(hybrid_cost_matrix(pursuers, live, grid, alpha));
}

inline Policy hybrid_pursuer_policy(HybridParams params = {}) {
    return [params](const WorldView& view, Rng&) {
        Controls out(view.pursuers.size());
        if (std::find(view.evader_alive.begin(), view.evader_alive.end(), 1) == view.evader_alive.end()) return out;
        const ValueGrid grid = hybrid_value_grid(view, params);
        std::vector<int> evader_index;
        const Assignment a = hybrid_assignment(view, grid, params.alpha, &evader_index);
        for (std::size_t i = 0; i < view.pursuers.size(); ++i) {
            if (a.target[i] == Assignment::kUnassigned) continue;
            const Vec2 target = view.evaders[static_cast<std::size_t>(evader_index[a.target[i]])].position;
            out[i] = pursuer_hybrid_control(view.pursuers[i].position, target, grid, params.alpha);
        }
        return out;
    };
}

inline Policy hybrid_evader_policy(HybridParams params = {}) {
    return [params](const WorldView& view, Rng&) {
        Controls out(view.evaders.size());
        if (std::find(view.evader_alive.begin(), view.evader_alive.end(), 1) == view.evader_alive.end()) return out;
        const ValueGrid grid = hybrid_value_grid(view, params);
        const auto pursuers = detail::positions(view.pursuers);
        const double r_avoid = params.avoid_radius > 0.0 ? params.avoid_radius : 3.0 * view.scenario.capture_radius;
        for (std::size_t j = 0; j < view.evaders.size(); ++j) {
            if (!view.evader_alive[j]) continue;
            out[j] = evader_escape_control(view.evaders[j].position, pursuers, grid, r_avoid);
        }
        return out;
    };
}

struct PolicyPair {
    Policy pursuers;
    Policy evaders;
};

inline PolicyPair default_policies(const Scenario& s, HybridParams params = {}) {
    if (s.kind == GameKind::OneVsMany) return {intercept_pursuer_policy(), weakest_link_evader_policy()};
    return {hybrid_pursuer_policy(params), hybrid_evader_policy(params)};
}

} // namespace hotstart
