#pragma once

#include <array>
#include <vector>

#include "pushgrasp/common.hpp"
#include "pushgrasp/sim.hpp"

namespace pg::percept {

/// Top-down observation of a scene on the workspace grid. depth is the
/// per-cell top-face height in meters, color the topmost color id + 1
/// (0 = empty), goal_mask the cells covered by the goal object.
struct Observation {
    GridD depth;
    GridU8 color;
    GridU8 goal_mask;
    GridFrame frame;

    bool operator==(const Observation&) const = default;
};

struct PerceptParams {
    int ring_radius = 4;          // cells
    double depth_tolerance = 1e-3;  // meters
    int colors = 8;
    double h_max = 0.05;  // depth channel scale at network input
};

Observation render(const sim::Scene& scene, const GridFrame& frame);

/// All-objects mask (any occupied cell); the goal-agnostic input mask.
GridU8 occupied_mask(const Observation& obs);

/// Network input tensor: depth/h_max, one-hot color, goal mask (C x H x W).
std::vector<GridD> input_channels(const Observation& obs, const PerceptParams& params);

/// The 16-entry rotated input stack; entry k is the observation rotated
/// by -k*22.5 degrees. Entries at k % 4 == 0 are exact permutations.
/// Each entry is a flat C x H x W tensor (channel-major planes).
struct RotatedStack {
    int channels = 0;
    int size = 0;  // H = W
    std::array<std::vector<double>, kNumRotations> entries;

    const double* entry(int k) const { return entries[k].data(); }
};

RotatedStack rotate_stack(const Observation& obs, const PerceptParams& params);
RotatedStack rotate_stack(const std::vector<GridD>& channels);

/// CCW rotation by s*22.5 degrees with the exact 90-degree component
/// applied as a grid permutation. `pre` applies the permutation before the
/// bilinear residual (used to build input stacks), `post` after it (used to
/// rotate Q maps back). The split keeps 90-degree-rotated pipelines
/// bit-identical.
GridD rotate_steps_pre(const GridD& img, int steps);
GridD rotate_steps_post(const GridD& img, int steps);

/// Exact CCW 90-degree permutation, applied `quarter_turns` times.
GridD rotate90(const GridD& img, int quarter_turns);
GridU8 rotate90(const GridU8& img, int quarter_turns);

/// Reference bilinear rotation (single resampling pass, any angle, CCW).
GridD bilinear_rotate(const GridD& img, double angle);

/// Ring of cells within `ring_radius` (Euclidean) of the goal mask,
/// excluding the mask itself.
GridU8 goal_ring(const GridU8& goal_mask, int ring_radius);

/// Fraction of ring cells occupied by non-goal objects.
double occupancy_ratio(const Observation& obs, int ring_radius);

struct NeighborhoodChange {
    int changed_cells = 0;
    double o_decreased = 0.0;
};

NeighborhoodChange neighborhood_change(const Observation& before, const Observation& after,
                                       const PerceptParams& params);

void dump_pgm(const GridD& g, const std::string& path);
void dump_csv(const GridD& g, const std::string& path);

}  // namespace pg::percept
