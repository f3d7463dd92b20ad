#pragma once

// Value function on a uniform grid over the arena with first-order upwind
// derivatives and an explicit Hamilton-Jacobi-Isaacs step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hotstart/vec2.hpp"

namespace hotstart {

enum class Role { Pursuer, Evader };

class ValueGrid {
public:
    explicit ValueGrid(int resolution = 41, double fill = 0.0)
        : resolution_(resolution) {
        if (resolution < 3) throw std::invalid_argument("value grid resolution must be >= 3");
        values_.assign(static_cast<std::size_t>(resolution) * resolution, fill);
    }

    int resolution() const { return resolution_; }
    double spacing() const { return (kWorldMax - kWorldMin) / (resolution_ - 1); }

    // (i, j) index x and y respectively.
    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }

    Vec2 cell_center(int i, int j) const { return {kWorldMin + i * spacing(), kWorldMin + j * spacing()}; }

    std::pair<int, int> nearest_cell(Vec2 p) const {
        auto idx = [&](double v) {
            const int k = static_cast<int>(std::lround((clamp_world(v) - kWorldMin) / spacing()));
            return std::clamp(k, 0, resolution_ - 1);
        };
        return {idx(p.x), idx(p.y)};
    }

    double bilinear(Vec2 p) const {
        const double h = spacing();
        const double fx = (clamp_world(p.x) - kWorldMin) / h;
        const double fy = (clamp_world(p.y) - kWorldMin) / h;
        const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, resolution_ - 2);
        const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, resolution_ - 2);
        const double tx = fx - i0;
        const double ty = fy - j0;
        const auto& v = *this;
        return (1 - tx) * (1 - ty) * v(i0, j0) + tx * (1 - ty) * v(i0 + 1, j0) +
               (1 - tx) * ty * v(i0, j0 + 1) + tx * ty * v(i0 + 1, j0 + 1);
    }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    std::span<const double> values() const { return values_; }

    // One line per i, values over j, comma separated.
    std::string to_csv() const {
        std::ostringstream out;
        out.precision(17);
        for (int i = 0; i < resolution_; ++i) {
            for (int j = 0; j < resolution_; ++j) {
                if (j) out << ',';
                out << (*this)(i, j);
            }
            out << '\n';
        }
        return out.str();
    }

    template <class F>
    static ValueGrid sample(int resolution, F&& f) {
        ValueGrid g(resolution);
        for (int i = 0; i < resolution; ++i)
            for (int j = 0; j < resolution; ++j) g(i, j) = f(g.cell_center(i, j));
        return g;
    }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution_) + static_cast<std::size_t>(j);
    }

    int resolution_;
    std::vector<double> values_;
};

// Distance to the nearest target minus the capture radius.
inline ValueGrid distance_field(int resolution, std::span<const Vec2> targets, double capture_radius) {
    if (targets.empty()) throw std::invalid_argument("distance field needs at least one target");
    return ValueGrid::sample(resolution, [&](Vec2 x) {
        double best = std::numeric_limits<double>::infinity();
        for (Vec2 t : targets) best = std::min(best, distance(x, t));
        return best - capture_radius;
    });
}

struct OneSided {
    std::optional<double> forward;
    std::optional<double> backward;
};

namespace detail {

inline OneSided one_sided_x(const ValueGrid& g, int i, int j) {
    const double h = g.spacing();
    OneSided d;
    if (i + 1 < g.resolution()) d.forward = (g(i + 1, j) - g(i, j)) / h;
    if (i > 0) d.backward = (g(i, j) - g(i - 1, j)) / h;
    return d;
}

inline OneSided one_sided_y(const ValueGrid& g, int i, int j) {
    const double h = g.spacing();
    OneSided d;
    if (j + 1 < g.resolution()) d.forward = (g(i, j + 1) - g(i, j)) / h;
    if (j > 0) d.backward = (g(i, j) - g(i, j - 1)) / h;
    return d;
}

// Minimizer takes the backward difference unless the forward one is negative;
// the maximizer mirrors that. Boundary cells use whichever side exists.
inline double select_upwind(const OneSided& d, Role role) {
    if (!d.forward) return *d.backward;
    if (!d.backward) return *d.forward;
    const double f = *d.forward;
    const double b = *d.backward;
    if (role == Role::Pursuer) return f >= 0.0 ? b : f;
    return f >= 0.0 ? f : b;
}

// Same selection, but at a local extremum where the two one-sided
// differences diverge the component follows the monotone (Godunov) choice,
// so the explicit step cannot push the extremum past its neighbours.
inline double select_monotone(const OneSided& d, Role role) {
    if (role == Role::Pursuer) {
        const double a = d.backward ? std::max(*d.backward, 0.0) : 0.0;
        const double b = d.forward ? std::min(*d.forward, 0.0) : 0.0;
        return std::abs(a) >= std::abs(b) ? a : b;
    }
    const double a = d.forward ? std::max(*d.forward, 0.0) : 0.0;
    const double b = d.backward ? std::min(*d.backward, 0.0) : 0.0;
    return std::abs(a) >= std::abs(b) ? a : b;
}

} // namespace detail

inline Vec2 upwind_gradient(const ValueGrid& grid, int i, int j, Role role) {
    if (i < 0 || j < 0 || i >= grid.resolution() || j >= grid.resolution())
        throw std::out_of_range("cell outside the value grid");
    return {detail::select_upwind(detail::one_sided_x(grid, i, j), role),
            detail::select_upwind(detail::one_sided_y(grid, i, j), role)};
}

inline Vec2 upwind_gradient(const ValueGrid& grid, Vec2 position, Role role) {
    const auto [i, j] = grid.nearest_cell(position);
    return upwind_gradient(grid, i, j, role);
}

inline void check_cfl(const ValueGrid& grid, double dt, double pursuer_speed, double evader_speed) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double courant = dt * std::max(pursuer_speed, evader_speed) / grid.spacing();
    if (courant > 1.0 + 1e-12)
        throw std::domain_error("CFL condition violated: dt*v/dx = " + std::to_string(courant));
}

namespace detail {

inline ValueGrid hji_substep(const ValueGrid& grid, double dt, double pursuer_speed, double evader_speed) {
    ValueGrid next(grid.resolution());
    for (int i = 0; i < grid.resolution(); ++i) {
        for (int j = 0; j < grid.resolution(); ++j) {
            const auto dx = one_sided_x(grid, i, j);
            const auto dy = one_sided_y(grid, i, j);
            const double px = select_monotone(dx, Role::Pursuer);
            const double py = select_monotone(dy, Role::Pursuer);
            const double ex = select_monotone(dx, Role::Evader);
            const double ey = select_monotone(dy, Role::Evader);
            const double hamiltonian = pursuer_speed * std::hypot(px, py) - evader_speed * std::hypot(ex, ey);
            next(i, j) = grid(i, j) - dt * hamiltonian;
        }
    }
    return next;
}

} // namespace detail

// V[k+1] = V[k] - dt * H where the pursuer closes the value at speed v_P and
// the evader opens it at speed v_E:  H = v_P |grad V|_pursuer - v_E |grad V|_evader.
//
// The per-axis CFL bound dt*v/dx <= 1 is what callers must respect. In two
// dimensions the scheme is only monotone for dt*v*sqrt(2)/dx <= 1, so a step
// above that bound is split into equal sub-steps that satisfy it.
inline ValueGrid hji_update(const ValueGrid& grid, double dt, double pursuer_speed, double evader_speed) {
    check_cfl(grid, dt, pursuer_speed, evader_speed);
    const double courant2d = std::sqrt(2.0) * dt * std::max(pursuer_speed, evader_speed) / grid.spacing();
    const int substeps = std::max(1, static_cast<int>(std::ceil(courant2d - 1e-12)));
    ValueGrid v = detail::hji_substep(grid, dt / substeps, pursuer_speed, evader_speed);
    for (int k = 1; k < substeps; ++k) v = detail::hji_substep(v, dt / substeps, pursuer_speed, evader_speed);
    return v;
}

} // namespace hotstart
