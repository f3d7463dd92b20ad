#pragma once

// Front-approximation quality indicators (minimisation sense): generational
// distance, its inverted form, their dominance-aware "+" variants, and the
// exact hypervolume in two and three dimensions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace hotstart {

using Point = std::vector<double>;
using PointSet = std::vector<Point>;

namespace detail {

inline void check_sets(const PointSet& a, const PointSet& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("indicator point sets must be non-empty");
    const std::size_t dim = a.front().size();
    auto same = [dim](const Point& p) { return p.size() == dim; };
    if (dim == 0 || !std::all_of(a.begin(), a.end(), same) || !std::all_of(b.begin(), b.end(), same))
        throw std::invalid_argument("indicator point sets have mismatched dimensions");
}

inline double euclid(const Point& a, const Point& z) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - z[k]) * (a[k] - z[k]);
    return std::sqrt(s);
}

// Distance from reference z to the region dominated by solution a.
inline double dominance_distance(const Point& a, const Point& z) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::max(a[k] - z[k], 0.0);
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace detail

// GD (inverted = false) averages over the approximation P; IGD averages over
// the reference P*. `plus` swaps Euclidean distance for the dominance-aware one.
inline double gd_family(const PointSet& approx, const PointSet& reference, double p = 2.0, bool plus = false,
                        bool inverted = false) {
    detail::check_sets(approx, reference);
    if (!(p > 0.0)) throw std::invalid_argument("power-mean exponent must be positive");
    const PointSet& outer = inverted ? reference : approx;
    const PointSet& inner = inverted ? approx : reference;
    double acc = 0.0;
    for (const auto& x : outer) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : inner) {
            const Point& a = inverted ? y : x;  // solution from the approximation
            const Point& z = inverted ? x : y;  // reference point
            best = std::min(best, plus ? detail::dominance_distance(a, z) : detail::euclid(a, z));
        }
        acc += std::pow(best, p);
    }
    return std::pow(acc / static_cast<double>(outer.size()), 1.0 / p);
}

inline double gd(const PointSet& a, const PointSet& r, double p = 2.0) { return gd_family(a, r, p, false, false); }
inline double gd_plus(const PointSet& a, const PointSet& r, double p = 2.0) { return gd_family(a, r, p, true, false); }
inline double igd(const PointSet& a, const PointSet& r, double p = 2.0) { return gd_family(a, r, p, false, true); }
inline double igd_plus(const PointSet& a, const PointSet& r, double p = 2.0) { return gd_family(a, r, p, true, true); }

namespace detail {

// Points given as (x, y) with x, y <= reference.
inline double hv2d(std::vector<std::pair<double, double>> pts, double rx, double ry) {
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double best_y = ry;
    for (const auto& [x, y] : pts) {
        if (y < best_y) {
            area += (rx - x) * (best_y - y);
            best_y = y;
        }
    }
    return area;
}

} // namespace detail

inline double hypervolume(const PointSet& points, const Point& reference) {
    const std::size_t dim = reference.size();
    if (dim != 2 && dim != 3) throw std::invalid_argument("hypervolume supports 2 or 3 objectives");
    for (const auto& p : points) {
        if (p.size() != dim) throw std::invalid_argument("hypervolume point dimension mismatch");
        for (std::size_t k = 0; k < dim; ++k)
            if (!(p[k] <= reference[k])) throw std::invalid_argument("point does not dominate the reference point");
    }
    if (points.empty()) return 0.0;

    if (dim == 2) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : points) pts.emplace_back(p[0], p[1]);
        return detail::hv2d(std::move(pts), reference[0], reference[1]);
    }

    // Sweep along the third objective; each slab is a 2-D problem.
    PointSet sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a[2] < b[2]; });
    double volume = 0.0;
    std::vector<std::pair<double, double>> active;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        active.emplace_back(sorted[i][0], sorted[i][1]);
        const double z_next = i + 1 < sorted.size() ? sorted[i + 1][2] : reference[2];
        const double depth = z_next - sorted[i][2];
        if (depth > 0.0) volume += depth * detail::hv2d(active, reference[0], reference[1]);
    }
    return volume;
}

struct IndicatorReport {
    double gd = 0.0;
    double gd_plus = 0.0;
    double igd = 0.0;
    double igd_plus = 0.0;
    double hypervolume = 0.0;
    Point reference;
    double p = 2.0;
};

inline IndicatorReport indicator_report(const PointSet& approx, const PointSet& front, const Point& reference,
                                        double p = 2.0) {
    IndicatorReport r;
    r.gd = gd(approx, front, p);
    r.gd_plus = gd_plus(approx, front, p);
    r.igd = igd(approx, front, p);
    r.igd_plus = igd_plus(approx, front, p);
    r.hypervolume = hypervolume(approx, reference);
    r.reference = reference;
    r.p = p;
    return r;
}

inline nlohmann::json to_json(const IndicatorReport& r) {
    return {{"gd", r.gd},       {"gd_plus", r.gd_plus},       {"igd", r.igd},
            {"igd_plus", r.igd_plus}, {"hypervolume", r.hypervolume}, {"reference", r.reference},
            {"p", r.p}};
}

} // namespace hotstart
