#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hotstart/vec2.hpp"

namespace hotstart {

inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
inline std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && orient(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0.0) --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(std::span<const Vec2> poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * std::abs(twice);
}

struct Containment {
    bool inside = false;
    double hull_area = 0.0;
    bool degenerate = false;  // fewer than three non-collinear pursuers
};

// Whether the evader lies in the pursuers' convex hull (boundary included).
inline Containment containment(std::span<const Vec2> pursuers, Vec2 evader) {
    Containment out;
    const auto hull = convex_hull(pursuers);
    if (hull.size() < 3) {
        out.degenerate = true;
        return out;
    }
    out.hull_area = polygon_area(hull);
    out.inside = true;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2 a = hull[i];
        const Vec2 b = hull[(i + 1) % hull.size()];
        const double scale = std::max(1.0, norm(b - a) * norm(evader - a));
        if (orient(a, b, evader) < -1e-12 * scale) {
            out.inside = false;
            break;
        }
    }
    return out;
}

} // namespace hotstart
