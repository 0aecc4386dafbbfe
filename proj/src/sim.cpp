#include "pushgrasp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pg::sim {

using geom::Shape2D;
using geom::Vec2;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kContactSlack = 1e-9;  // keeps resolved contacts strictly separated
}  // namespace

const char* to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Rectangle: return "rect";
        case ShapeKind::Disc: return "disc";
        case ShapeKind::Triangle: return "tri";
    }
    return "?";
}

ShapeKind shape_kind_from(const std::string& s) {
    if (s == "rect") return ShapeKind::Rectangle;
    if (s == "disc") return ShapeKind::Disc;
    if (s == "tri") return ShapeKind::Triangle;
    fail(ErrorCode::ParseError, "unknown shape kind '" + s + "'");
}

double wrap_angle(double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    return t;
}

const PlacedObject* Scene::find(ObjectId id) const {
    for (const auto& o : objects)
        if (o.spec.id == id) return &o;
    return nullptr;
}

Shape2D footprint(const ObjectSpec& spec, const Pose2D& pose) {
    Vec2 c{pose.x, pose.y};
    switch (spec.shape) {
        case ShapeKind::Disc:
            return Shape2D::disc(c, spec.dim_a);
        case ShapeKind::Rectangle: {
            double hw = spec.dim_a * 0.5, hl = spec.dim_b * 0.5;
            std::vector<Vec2> local{{-hw, -hl}, {hw, -hl}, {hw, hl}, {-hw, hl}};
            for (auto& v : local) v = geom::rotated(v, pose.theta) + c;
            return Shape2D::polygon(std::move(local));
        }
        case ShapeKind::Triangle: {
            // isoceles, centroid at origin: apex (2h/3, 0), base at x = -h/3
            double b = spec.dim_a, h = spec.dim_b;
            std::vector<Vec2> local{{2.0 * h / 3.0, 0.0}, {-h / 3.0, b * 0.5}, {-h / 3.0, -b * 0.5}};
            for (auto& v : local) v = geom::rotated(v, pose.theta) + c;
            return Shape2D::polygon(std::move(local));
        }
    }
    fail(ErrorCode::Internal, "bad shape kind");
}

double rotation_angle(int k) { return k * (kPi / 8.0); }
Vec2 rotation_dir(int k) { return {std::cos(rotation_angle(k)), std::sin(rotation_angle(k))}; }

namespace {

// Clamp a pose so the object's footprint stays inside the workspace.
Pose2D clamp_pose(const ObjectSpec& spec, Pose2D pose, const Workspace& ws) {
    Shape2D fp = footprint(spec, pose);
    double over_px = geom::support(fp, {1, 0}) - ws.max_x();
    double over_nx = geom::support(fp, {-1, 0}) + ws.min_x;
    double over_py = geom::support(fp, {0, 1}) - ws.max_y();
    double over_ny = geom::support(fp, {0, -1}) + ws.min_y;
    if (over_px > 0) pose.x -= over_px;
    if (over_nx > 0) pose.x += over_nx;
    if (over_py > 0) pose.y -= over_py;
    if (over_ny > 0) pose.y += over_ny;
    return pose;
}

bool pose_in_bounds(const ObjectSpec& spec, const Pose2D& pose, const Workspace& ws) {
    Shape2D fp = footprint(spec, pose);
    return geom::support(fp, {1, 0}) <= ws.max_x() && -geom::support(fp, {-1, 0}) >= ws.min_x &&
           geom::support(fp, {0, 1}) <= ws.max_y() && -geom::support(fp, {0, -1}) >= ws.min_y;
}

}  // namespace

Scene generate_random_scene(int n_objects, std::uint64_t seed, const ShapePool& pool,
                            const Workspace& ws, const WorldParams& params) {
    if (n_objects < 1) fail(ErrorCode::UsageError, "n_objects must be >= 1");
    Rng rng(seed);
    Scene scene;
    scene.workspace = ws;

    Vec2 cluster{0, 0};
    if (pool.cluster_stddev > 0.0) {
        cluster = {rng.uniform(ws.min_x + 0.3 * ws.size, ws.min_x + 0.7 * ws.size),
                   rng.uniform(ws.min_y + 0.3 * ws.size, ws.min_y + 0.7 * ws.size)};
    }

    for (int i = 0; i < n_objects; ++i) {
        ObjectSpec spec;
        spec.id = i;
        spec.color_id = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(pool.colors)));
        spec.height = rng.uniform(pool.height_min, pool.height_max);
        switch (rng.uniform_index(3)) {
            case 0:
                spec.shape = ShapeKind::Rectangle;
                spec.dim_a = rng.uniform(pool.rect_w_min, pool.rect_w_max);
                spec.dim_b = rng.uniform(pool.rect_l_min, pool.rect_l_max);
                break;
            case 1:
                spec.shape = ShapeKind::Disc;
                spec.dim_a = rng.uniform(pool.disc_r_min, pool.disc_r_max);
                spec.dim_b = 0.0;
                break;
            default:
                spec.shape = ShapeKind::Triangle;
                spec.dim_a = rng.uniform(pool.tri_b_min, pool.tri_b_max);
                spec.dim_b = rng.uniform(pool.tri_h_min, pool.tri_h_max);
                break;
        }

        bool placed = false;
        for (int attempt = 0; attempt < params.max_place_attempts; ++attempt) {
            Pose2D pose;
            pose.theta = rng.uniform(0.0, 2.0 * kPi);
            if (pool.cluster_stddev > 0.0) {
                pose.x = cluster.x + rng.normal(0.0, pool.cluster_stddev);
                pose.y = cluster.y + rng.normal(0.0, pool.cluster_stddev);
                pose.x = std::clamp(pose.x, ws.min_x, ws.max_x());
                pose.y = std::clamp(pose.y, ws.min_y, ws.max_y());
                pose = clamp_pose(spec, pose, ws);
            } else {
                pose.x = rng.uniform(ws.min_x, ws.max_x());
                pose.y = rng.uniform(ws.min_y, ws.max_y());
                if (!pose_in_bounds(spec, pose, ws)) continue;
            }
            Shape2D fp = footprint(spec, pose);
            bool clear = true;
            for (const auto& other : scene.objects) {
                if (!geom::separated(fp, footprint(other.spec, other.pose))) {
                    clear = false;
                    break;
                }
            }
            if (clear && pose_in_bounds(spec, pose, ws)) {
                scene.objects.push_back({spec, pose});
                placed = true;
                break;
            }
        }
        if (!placed)
            fail(ErrorCode::PlacementExhausted,
                 "could not place object " + std::to_string(i) + " after " +
                     std::to_string(params.max_place_attempts) + " attempts");
    }
    scene.goal_id =
        scene.objects[rng.uniform_index(static_cast<std::uint64_t>(n_objects))].spec.id;
    return scene;
}

StepOutcome apply_push(const Scene& scene, const PushCommand& cmd, const WorldParams& params) {
    StepOutcome out;
    out.kind = OutcomeKind::Pushed;
    out.next_scene = scene;
    const Workspace& ws = scene.workspace;

    Vec2 start{std::clamp(cmd.start.x, ws.min_x, ws.max_x()),
               std::clamp(cmd.start.y, ws.min_y, ws.max_y())};
    Vec2 dir = rotation_dir(cmd.rotation);
    const double L = cmd.length;

    auto& objs = out.next_scene.objects;

    // Direct pusher contact: displacement along dir equals the sweep length
    // past the ray's entry into the r_p-inflated footprint.
    for (auto& obj : objs) {
        Shape2D fp = footprint(obj.spec, obj.pose);
        auto iv = geom::ray_hit_interval(fp, params.pusher_radius, start, dir);
        if (!iv) continue;
        if (iv->second <= 0.0 || iv->first >= L) continue;
        double delta = L - iv->first;
        obj.pose.x += delta * dir.x;
        obj.pose.y += delta * dir.y;
        obj.pose = clamp_pose(obj.spec, obj.pose, ws);
    }

    // Chained contacts, resolved in order of projection along the push axis.
    std::vector<size_t> order(objs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        double pa = dot(Vec2{objs[a].pose.x, objs[a].pose.y}, dir);
        double pb = dot(Vec2{objs[b].pose.x, objs[b].pose.y}, dir);
        if (pa != pb) return pa < pb;
        return objs[a].spec.id < objs[b].spec.id;
    });

    for (int pass = 0; pass < 8; ++pass) {
        bool any_moved = false;
        for (size_t oi = 0; oi < order.size(); ++oi) {
            for (size_t oj = oi + 1; oj < order.size(); ++oj) {
                auto& a = objs[order[oi]];
                auto& b = objs[order[oj]];
                Shape2D fa = footprint(a.spec, a.pose);
                Shape2D fb = footprint(b.spec, b.pose);
                if (geom::separated(fa, fb)) continue;
                auto iv = geom::contact_interval(fa, fb, dir);
                if (!iv || iv->second <= 0.0) continue;
                double shift = iv->second + kContactSlack;
                Pose2D moved = b.pose;
                moved.x += shift * dir.x;
                moved.y += shift * dir.y;
                moved = clamp_pose(b.spec, moved, ws);
                if (moved.x != b.pose.x || moved.y != b.pose.y) {
                    b.pose = moved;
                    any_moved = true;
                }
            }
        }
        if (!any_moved) break;
    }

    for (size_t i = 0; i < objs.size(); ++i) {
        double dx = objs[i].pose.x - scene.objects[i].pose.x;
        double dy = objs[i].pose.y - scene.objects[i].pose.y;
        if (std::sqrt(dx * dx + dy * dy) > params.eps_move)
            out.moved_ids.insert(objs[i].spec.id);
    }
    return out;
}

GraspFootprint grasp_footprint(const GraspCommand& cmd) {
    double theta = rotation_angle(cmd.rotation);
    Vec2 axis{std::cos(theta), std::sin(theta)};       // closing axis
    Vec2 perp{-axis.y, axis.x};

    auto rect = [&](Vec2 center, double along, double across) {
        double ha = along * 0.5, hc = across * 0.5;
        std::vector<Vec2> v{center + axis * (-ha) + perp * (-hc), center + axis * ha + perp * (-hc),
                            center + axis * ha + perp * hc, center + axis * (-ha) + perp * hc};
        return Shape2D::polygon(std::move(v));
    };

    GraspFootprint g;
    double jaw_offset = cmd.open_width * 0.5 + cmd.jaw_thickness * 0.5;
    g.jaw_a = rect(cmd.center + axis * (-jaw_offset), cmd.jaw_thickness, cmd.jaw_length);
    g.jaw_b = rect(cmd.center + axis * jaw_offset, cmd.jaw_thickness, cmd.jaw_length);
    g.between = rect(cmd.center, cmd.open_width, cmd.jaw_length);
    return g;
}

bool grasp_in_bounds(const GraspCommand& cmd, const Workspace& ws) {
    GraspFootprint g = grasp_footprint(cmd);
    for (const Shape2D* s : {&g.jaw_a, &g.jaw_b, &g.between}) {
        if (geom::support(*s, {1, 0}) > ws.max_x()) return false;
        if (-geom::support(*s, {-1, 0}) < ws.min_x) return false;
        if (geom::support(*s, {0, 1}) > ws.max_y()) return false;
        if (-geom::support(*s, {0, -1}) < ws.min_y) return false;
    }
    return true;
}

namespace {

// Visit centers of the subcell lattice covering the AABB of `region`.
// The lattice is anchored at the workspace origin so tests and the
// implementation sample identical points.
template <typename F>
void for_subcells_in(const Shape2D& region, const Workspace& ws, double subcell, F&& fn) {
    geom::Aabb box = aabb_of(region);
    int c0 = static_cast<int>(std::floor((box.min_x - ws.min_x) / subcell));
    int c1 = static_cast<int>(std::ceil((box.max_x - ws.min_x) / subcell));
    int r0 = static_cast<int>(std::floor((box.min_y - ws.min_y) / subcell));
    int r1 = static_cast<int>(std::ceil((box.max_y - ws.min_y) / subcell));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            Vec2 p{ws.min_x + (c + 0.5) * subcell, ws.min_y + (r + 0.5) * subcell};
            if (point_in(region, p)) fn(p);
        }
    }
}

}  // namespace

double overlap_area(const Shape2D& a, const Shape2D& b, double subcell) {
    Workspace anchor{0.0, 0.0, 1.0};
    long count = 0;
    for_subcells_in(a, anchor, subcell, [&](Vec2 p) {
        if (point_in(b, p)) ++count;
    });
    return count * subcell * subcell;
}

StepOutcome apply_grasp(const Scene& scene, const GraspCommand& cmd, const WorldParams& params) {
    StepOutcome out;
    out.kind = OutcomeKind::GraspFail;
    out.next_scene = scene;

    if (!grasp_in_bounds(cmd, scene.workspace)) return out;

    GraspFootprint g = grasp_footprint(cmd);
    std::vector<Shape2D> fps;
    fps.reserve(scene.objects.size());
    for (const auto& o : scene.objects) fps.push_back(footprint(o.spec, o.pose));

    // (i) insertion clearance: no occupied subcell inside either jaw
    for (const Shape2D* jaw : {&g.jaw_a, &g.jaw_b}) {
        bool blocked = false;
        for_subcells_in(*jaw, scene.workspace, params.subcell, [&](Vec2 p) {
            if (blocked) return;
            for (const auto& fp : fps) {
                if (point_in(fp, p)) {
                    blocked = true;
                    return;
                }
            }
        });
        if (blocked) return out;
    }

    // (ii/iii) between-jaws occupancy per object
    std::vector<long> counts(scene.objects.size(), 0);
    for_subcells_in(g.between, scene.workspace, params.subcell, [&](Vec2 p) {
        for (size_t i = 0; i < fps.size(); ++i) {
            if (point_in(fps[i], p)) ++counts[i];
        }
    });

    long best_count = 0;
    size_t best_idx = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
        // ties break toward the lower object id; scene order is id order
        // for generated scenes but not necessarily for loaded ones
        if (counts[i] > best_count ||
            (counts[i] == best_count && counts[i] > 0 &&
             scene.objects[i].spec.id < scene.objects[best_idx].spec.id)) {
            best_count = counts[i];
            best_idx = i;
        }
    }
    if (best_count == 0) return out;

    Vec2 axis = rotation_dir(cmd.rotation);
    double width = geom::extent_along(fps[best_idx], axis);
    if (width > cmd.open_width) return out;

    out.kind = OutcomeKind::GraspSuccess;
    out.grasped_id = scene.objects[best_idx].spec.id;
    out.next_scene.objects.erase(out.next_scene.objects.begin() + best_idx);
    return out;
}

}  // namespace pg::sim
