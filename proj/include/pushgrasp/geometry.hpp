#pragma once

#include <optional>
#include <vector>

#include "pushgrasp/common.hpp"

namespace pg::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
double norm(Vec2 a);
Vec2 rotated(Vec2 v, double angle);

/// Convex footprint in the workspace plane: either a CCW polygon or a disc.
struct Shape2D {
    enum class Kind { Polygon, Disc } kind = Kind::Disc;
    std::vector<Vec2> verts;  // CCW, Polygon only
    Vec2 center;              // Disc only
    double radius = 0.0;      // Disc only

    static Shape2D polygon(std::vector<Vec2> ccw_verts);
    static Shape2D disc(Vec2 center, double radius);
};

struct Aabb {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

Aabb aabb_of(const Shape2D& s);

/// Largest dot(v, dir) over the shape.
double support(const Shape2D& s, Vec2 dir);

/// Width of the shape along an axis (support both ways). dir need not be unit.
double extent_along(const Shape2D& s, Vec2 unit_dir);

bool point_in(const Shape2D& s, Vec2 p);

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b);

/// Euclidean distance from p to the shape (0 inside).
double dist_point_shape(Vec2 p, const Shape2D& s);

/// True when the interiors of a and b are disjoint (touching counts as
/// separated). Exact separating-axis test for polygons, center distance
/// for discs.
bool separated(const Shape2D& a, const Shape2D& b);

/// Parameter interval [t0,t1] where dist(p0 + t*dir, s) <= inflate, with
/// dir a unit vector. Empty optional when the ray line misses entirely.
std::optional<std::pair<double, double>> ray_hit_interval(const Shape2D& s, double inflate,
                                                          Vec2 p0, Vec2 dir);

/// Interval {t : a intersects (b translated by t*dir)}.
std::optional<std::pair<double, double>> contact_interval(const Shape2D& a, const Shape2D& b,
                                                          Vec2 dir);

/// Minkowski sum of two convex polygons (CCW in, CCW out).
std::vector<Vec2> minkowski_sum(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

Shape2D translated(const Shape2D& s, Vec2 d);

}  // namespace pg::geom
