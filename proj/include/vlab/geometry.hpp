#pragma once

#include <cmath>

namespace vlab {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s)      { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a)      { return a *= s; }
inline Vec2 operator*(Vec2 a, double s)      { return a *= s; }
inline Vec2 operator-(const Vec2& a)         { return {-a.x, -a.y}; }

inline double dot(const Vec2& a, const Vec2& b)   { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& a)                { return a.x * a.x + a.y * a.y; }
inline double norm(const Vec2& a)                 { return std::hypot(a.x, a.y); }

// 90-degree counterclockwise rotation: v^perp = (-v_y, v_x)
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

inline Vec2 lerp(const Vec2& a, const Vec2& b, double s) {
    return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
}

inline Vec2 rotate(const Vec2& a, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

} // namespace vlab
