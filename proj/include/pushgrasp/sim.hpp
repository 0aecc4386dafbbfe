#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pushgrasp/common.hpp"
#include "pushgrasp/geometry.hpp"
#include "pushgrasp/rng.hpp"

namespace pg::sim {

enum class ShapeKind : std::uint8_t { Rectangle, Disc, Triangle };

const char* to_string(ShapeKind k);
ShapeKind shape_kind_from(const std::string& s);

/// Physical object description. Rectangles are w x l (w along local x),
/// triangles are isoceles with base b along local y and apex on +x, both
/// centered at their centroid. Heights are top-face elevations in meters.
struct ObjectSpec {
    ShapeKind shape = ShapeKind::Disc;
    double dim_a = 0.02;  // rect w | disc radius | triangle base
    double dim_b = 0.0;   // rect l | unused      | triangle height
    double height = 0.03;
    int color_id = 0;
    ObjectId id = 0;

    bool operator==(const ObjectSpec&) const = default;
};

struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // radians, wrapped to [0, 2*pi)

    bool operator==(const Pose2D&) const = default;
};

double wrap_angle(double theta);

struct PlacedObject {
    ObjectSpec spec;
    Pose2D pose;

    bool operator==(const PlacedObject&) const = default;
};

struct Workspace {
    double min_x = 0.0;
    double min_y = 0.0;
    double size = 0.64;  // axis-aligned square

    double max_x() const { return min_x + size; }
    double max_y() const { return min_y + size; }
    bool operator==(const Workspace&) const = default;
};

struct Scene {
    std::vector<PlacedObject> objects;
    Workspace workspace;
    ObjectId goal_id = kNoObject;

    const PlacedObject* find(ObjectId id) const;
    bool operator==(const Scene&) const = default;
};

/// World-frame footprint of a posed object.
geom::Shape2D footprint(const ObjectSpec& spec, const Pose2D& pose);

struct PushCommand {
    geom::Vec2 start;
    int rotation = 0;     // angle = rotation * 22.5 degrees
    double length = 0.05;
};

struct GraspCommand {
    geom::Vec2 center;
    int rotation = 0;       // closing axis angle = rotation * 22.5 degrees
    double open_width = 0.04;
    double jaw_length = 0.03;
    double jaw_thickness = 0.01;
};

enum class OutcomeKind : std::uint8_t { Pushed, GraspSuccess, GraspFail };

struct StepOutcome {
    OutcomeKind kind = OutcomeKind::Pushed;
    ObjectId grasped_id = kNoObject;
    std::set<ObjectId> moved_ids;
    Scene next_scene;
};

/// Geometry constants shared by the simulator; all lengths in meters.
struct WorldParams {
    double pusher_radius = 0.01;
    double push_length = 0.05;
    double open_width = 0.04;
    double jaw_length = 0.03;
    double jaw_thickness = 0.01;
    double eps_overlap_area = 0.25e-4;  // quarter of a 1 cm cell
    double eps_move = 1e-4;
    double h_max = 0.05;
    int max_place_attempts = 1000;
    double subcell = 0.0025;  // rasterized contact-test resolution
};

struct ShapePool {
    double rect_w_min = 0.020, rect_w_max = 0.030;
    double rect_l_min = 0.040, rect_l_max = 0.080;
    double disc_r_min = 0.012, disc_r_max = 0.015;
    double tri_b_min = 0.024, tri_b_max = 0.032;
    double tri_h_min = 0.026, tri_h_max = 0.036;
    double height_min = 0.020, height_max = 0.045;
    int colors = 8;
    double cluster_stddev = 0.0;  // 0 = uniform placement
};

double rotation_angle(int rotation_index);
geom::Vec2 rotation_dir(int rotation_index);

Scene generate_random_scene(int n_objects, std::uint64_t seed, const ShapePool& pool,
                            const Workspace& ws, const WorldParams& params);

StepOutcome apply_push(const Scene& scene, const PushCommand& cmd, const WorldParams& params);
StepOutcome apply_grasp(const Scene& scene, const GraspCommand& cmd, const WorldParams& params);

/// Jaw and between-jaws rectangles for a grasp, in world frame.
struct GraspFootprint {
    geom::Shape2D jaw_a;
    geom::Shape2D jaw_b;
    geom::Shape2D between;
};
GraspFootprint grasp_footprint(const GraspCommand& cmd);

/// True when the full gripper footprint stays inside the workspace.
bool grasp_in_bounds(const GraspCommand& cmd, const Workspace& ws);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);
Scene parse_scene(std::istream& in, const std::string& origin);
void write_scene(const Scene& scene, std::ostream& out);

/// Rasterized overlap area between two footprints (subcell sampling).
double overlap_area(const geom::Shape2D& a, const geom::Shape2D& b, double subcell);

}  // namespace pg::sim
