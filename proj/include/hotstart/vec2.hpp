#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hotstart {

inline constexpr double kWorldMin = -1.0;
inline constexpr double kWorldMax = 1.0;
inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Unit vector along `a`, or the zero vector when `a` has (near) zero length.
inline Vec2 normalized(Vec2 a, double eps = 1e-12) {
    const double n = norm(a);
    return n > eps ? a / n : Vec2{};
}

inline Vec2 from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

inline double clamp_world(double v) { return std::clamp(v, kWorldMin, kWorldMax); }
inline Vec2 clamp_world(Vec2 p) { return {clamp_world(p.x), clamp_world(p.y)}; }

inline bool in_world(Vec2 p) {
    return p.x >= kWorldMin && p.x <= kWorldMax && p.y >= kWorldMin && p.y <= kWorldMax;
}

} // namespace hotstart
