#include "pushgrasp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pg::geom {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallelEps = 1e-15;
}  // namespace

double norm(Vec2 a) { return std::sqrt(norm2(a)); }

Vec2 rotated(Vec2 v, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Shape2D Shape2D::polygon(std::vector<Vec2> ccw_verts) {
    Shape2D s;
    s.kind = Kind::Polygon;
    s.verts = std::move(ccw_verts);
    return s;
}

Shape2D Shape2D::disc(Vec2 center, double radius) {
    Shape2D s;
    s.kind = Kind::Disc;
    s.center = center;
    s.radius = radius;
    return s;
}

Aabb aabb_of(const Shape2D& s) {
    if (s.kind == Shape2D::Kind::Disc)
        return {s.center.x - s.radius, s.center.y - s.radius, s.center.x + s.radius,
                s.center.y + s.radius};
    Aabb b{kInf, kInf, -kInf, -kInf};
    for (auto v : s.verts) {
        b.min_x = std::min(b.min_x, v.x);
        b.min_y = std::min(b.min_y, v.y);
        b.max_x = std::max(b.max_x, v.x);
        b.max_y = std::max(b.max_y, v.y);
    }
    return b;
}

double support(const Shape2D& s, Vec2 dir) {
    if (s.kind == Shape2D::Kind::Disc) return dot(s.center, dir) + s.radius * norm(dir);
    double best = -kInf;
    for (auto v : s.verts) best = std::max(best, dot(v, dir));
    return best;
}

double extent_along(const Shape2D& s, Vec2 unit_dir) {
    return support(s, unit_dir) + support(s, -unit_dir);
}

bool point_in(const Shape2D& s, Vec2 p) {
    if (s.kind == Shape2D::Kind::Disc) return norm2(p - s.center) <= s.radius * s.radius;
    const auto& v = s.verts;
    for (size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
}

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = norm2(ab);
    if (len2 <= 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

double dist_point_shape(Vec2 p, const Shape2D& s) {
    if (s.kind == Shape2D::Kind::Disc) return std::max(0.0, norm(p - s.center) - s.radius);
    if (point_in(s, p)) return 0.0;
    double best = kInf;
    const auto& v = s.verts;
    for (size_t i = 0; i < v.size(); ++i)
        best = std::min(best, dist_point_segment(p, v[i], v[(i + 1) % v.size()]));
    return best;
}

namespace {

// Projection interval of a shape onto an axis.
std::pair<double, double> project(const Shape2D& s, Vec2 axis) {
    return {-support(s, -axis), support(s, axis)};
}

bool sat_separated_on(const Shape2D& a, const Shape2D& b, Vec2 axis) {
    auto [a0, a1] = project(a, axis);
    auto [b0, b1] = project(b, axis);
    return a1 <= b0 || b1 <= a0;
}

}  // namespace

bool separated(const Shape2D& a, const Shape2D& b) {
    if (a.kind == Shape2D::Kind::Disc && b.kind == Shape2D::Kind::Disc)
        return norm(a.center - b.center) >= a.radius + b.radius;
    if (a.kind == Shape2D::Kind::Disc) return dist_point_shape(a.center, b) >= a.radius;
    if (b.kind == Shape2D::Kind::Disc) return dist_point_shape(b.center, a) >= b.radius;
    // polygon vs polygon: edge normals of both
    for (const Shape2D* poly : {&a, &b}) {
        const auto& v = poly->verts;
        for (size_t i = 0; i < v.size(); ++i) {
            Vec2 e = v[(i + 1) % v.size()] - v[i];
            Vec2 n{-e.y, e.x};
            if (sat_separated_on(a, b, n)) return true;
        }
    }
    return false;
}

namespace {

using Interval = std::pair<double, double>;

std::optional<Interval> merge(std::optional<Interval> acc, std::optional<Interval> piece) {
    if (!piece) return acc;
    if (!acc) return piece;
    return Interval{std::min(acc->first, piece->first), std::max(acc->second, piece->second)};
}

// Ray vs disc of radius r centered at c: |p0 + t d - c| <= r.
std::optional<Interval> ray_disc(Vec2 c, double r, Vec2 p0, Vec2 d) {
    Vec2 m = p0 - c;
    // t^2 + 2 (m.d) t + |m|^2 - r^2 <= 0   (d unit)
    double b = dot(m, d);
    double cc = norm2(m) - r * r;
    double disc = b * b - cc;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    return Interval{-b - sq, -b + sq};
}

// Ray vs convex polygon via half-plane clipping (Cyrus-Beck).
std::optional<Interval> ray_poly(const std::vector<Vec2>& verts, Vec2 p0, Vec2 d) {
    double tlo = -kInf, thi = kInf;
    for (size_t i = 0; i < verts.size(); ++i) {
        Vec2 a = verts[i], b = verts[(i + 1) % verts.size()];
        Vec2 e = b - a;
        Vec2 n{e.y, -e.x};  // outward normal for CCW polygon
        double denom = dot(n, d);
        double num = dot(n, a - p0);  // n.(p0 + t d - a) <= 0  =>  t * denom <= num
        if (std::abs(denom) < kParallelEps) {
            if (num < 0.0) return std::nullopt;  // outside this half-plane, parallel
            continue;
        }
        double t = num / denom;
        if (denom > 0.0)
            thi = std::min(thi, t);
        else
            tlo = std::max(tlo, t);
        if (tlo > thi) return std::nullopt;
    }
    return Interval{tlo, thi};
}

// Ray vs oriented rectangle strip built by inflating segment [a,b] by r
// along its normal. Used as one component of a rounded polygon.
std::optional<Interval> ray_edge_strip(Vec2 a, Vec2 b, double r, Vec2 p0, Vec2 d) {
    Vec2 e = b - a;
    double len = norm(e);
    if (len <= 0.0) return std::nullopt;
    Vec2 n{e.y / len, -e.x / len};
    std::vector<Vec2> rect{a + n * r, b + n * r, b - n * r, a - n * r};
    // ensure CCW
    double area2 = 0.0;
    for (size_t i = 0; i < rect.size(); ++i) area2 += cross(rect[i], rect[(i + 1) % rect.size()]);
    if (area2 < 0.0) std::reverse(rect.begin(), rect.end());
    return ray_poly(rect, p0, d);
}

}  // namespace

std::optional<std::pair<double, double>> ray_hit_interval(const Shape2D& s, double inflate,
                                                          Vec2 p0, Vec2 dir) {
    if (s.kind == Shape2D::Kind::Disc) return ray_disc(s.center, s.radius + inflate, p0, dir);
    if (inflate <= 0.0) return ray_poly(s.verts, p0, dir);
    // Rounded polygon = core polygon + per-edge strips + per-vertex discs.
    // The union is convex, so min/max over the pieces is the exact interval.
    std::optional<Interval> acc = ray_poly(s.verts, p0, dir);
    const auto& v = s.verts;
    for (size_t i = 0; i < v.size(); ++i) {
        acc = merge(acc, ray_edge_strip(v[i], v[(i + 1) % v.size()], inflate, p0, dir));
        acc = merge(acc, ray_disc(v[i], inflate, p0, dir));
    }
    return acc;
}

std::vector<Vec2> minkowski_sum(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    // Classic CCW edge merge, starting from the bottom-most (then left-most)
    // vertex of each polygon.
    auto start_index = [](const std::vector<Vec2>& p) {
        size_t best = 0;
        for (size_t i = 1; i < p.size(); ++i)
            if (p[i].y < p[best].y || (p[i].y == p[best].y && p[i].x < p[best].x)) best = i;
        return best;
    };
    size_t ia = start_index(a), ib = start_index(b);
    size_t na = a.size(), nb = b.size();
    std::vector<Vec2> out;
    out.reserve(na + nb);
    size_t ca = 0, cb = 0;
    Vec2 cur = a[ia] + b[ib];
    while (ca < na || cb < nb) {
        out.push_back(cur);
        Vec2 ea = a[(ia + 1) % na] - a[ia % na];
        Vec2 eb = b[(ib + 1) % nb] - b[ib % nb];
        double c = (ca < na && cb < nb) ? cross(ea, eb) : (ca < na ? 1.0 : -1.0);
        if (c > 0.0) {
            cur = cur + ea;
            ++ia;
            ++ca;
        } else if (c < 0.0) {
            cur = cur + eb;
            ++ib;
            ++cb;
        } else {
            cur = cur + ea + eb;
            ++ia;
            ++ca;
            ++ib;
            ++cb;
        }
    }
    return out;
}

Shape2D translated(const Shape2D& s, Vec2 d) {
    Shape2D out = s;
    if (s.kind == Shape2D::Kind::Disc) {
        out.center = s.center + d;
    } else {
        for (auto& v : out.verts) v = v + d;
    }
    return out;
}

std::optional<std::pair<double, double>> contact_interval(const Shape2D& a, const Shape2D& b,
                                                          Vec2 dir) {
    using K = Shape2D::Kind;
    if (a.kind == K::Disc && b.kind == K::Disc) {
        // |ca - (cb + t d)| <= ra + rb
        return ray_disc(a.center, a.radius + b.radius, b.center, dir);
    }
    if (a.kind == K::Polygon && b.kind == K::Disc) {
        // dist(cb + t d, a) <= rb
        return ray_hit_interval(a, b.radius, b.center, dir);
    }
    if (a.kind == K::Disc && b.kind == K::Polygon) {
        // dist(ca - t d, b) <= ra ; substitute u = -t
        auto iv = ray_hit_interval(b, a.radius, a.center, -dir);
        if (!iv) return std::nullopt;
        return std::pair<double, double>{-iv->second, -iv->first};
    }
    // polygon-polygon: {t : 0 in a + (-b) - t d} = ray through minkowski_sum(a, -b)
    std::vector<Vec2> nb;
    nb.reserve(b.verts.size());
    for (auto v : b.verts) nb.push_back(-v);
    // negation reverses orientation; restore CCW
    std::reverse(nb.begin(), nb.end());
    auto m = minkowski_sum(a.verts, nb);
    return ray_poly(m, {0.0, 0.0}, dir);
}

}  // namespace pg::geom
