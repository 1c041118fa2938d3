#pragma once

#include <cmath>
#include <vector>

namespace tjflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline double dist_sq(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Axis-aligned rectangle given by lower-left corner and extents.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const Rect&) const = default;

    double x1() const { return x0 + w; }
    double y1() const { return y0 + h; }
    double area() const { return w * h; }
    Vec2 center() const { return {x0 + 0.5 * w, y0 + 0.5 * h}; }
    bool contains(Vec2 p) const {
        return p.x >= x0 && p.x <= x1() && p.y >= y0 && p.y <= y1();
    }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1() <= x1() && r.y0 >= y0 && r.y1() <= y1();
    }
};

struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Closed polygon; consecutive vertices are edges, last connects to first.
using Polygon = std::vector<Vec2>;

inline Polygon rect_polygon(const Rect& r) {
    return {{r.x0, r.y0}, {r.x1(), r.y0}, {r.x1(), r.y1()}, {r.x0, r.y1()}};
}

/// Even-odd rule; points exactly on an edge count as inside for at most
/// one of the two polygons sharing that edge.
inline bool point_in_polygon(const Polygon& poly, Vec2 p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& vi = poly[i];
        const Vec2& vj = poly[j];
        if ((vi.y > p.y) != (vj.y > p.y)) {
            const double xc = vj.x + (p.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

inline double dist_point_segment(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return dist(p, s.a);
    double t = dot(p - s.a, d) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return dist(p, s.a + t * d);
}

} // namespace tjflow
