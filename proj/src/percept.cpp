#include "pushgrasp/percept.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace pg::percept {

using geom::Vec2;

Observation render(const sim::Scene& scene, const GridFrame& frame) {
    Observation obs;
    obs.frame = frame;
    obs.depth = GridD(frame.cells, frame.cells, 0.0);
    obs.color = GridU8(frame.cells, frame.cells, 0);
    obs.goal_mask = GridU8(frame.cells, frame.cells, 0);

    for (const auto& obj : scene.objects) {
        geom::Shape2D fp = sim::footprint(obj.spec, obj.pose);
        geom::Aabb box = geom::aabb_of(fp);
        int c0 = std::max(0, frame.col_of(box.min_x));
        int c1 = std::min(frame.cells - 1, frame.col_of(box.max_x));
        int r0 = std::max(0, frame.row_of(box.min_y));
        int r1 = std::min(frame.cells - 1, frame.row_of(box.max_y));
        bool is_goal = obj.spec.id == scene.goal_id;
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                if (!geom::point_in(fp, {frame.cell_x(c), frame.cell_y(r)})) continue;
                if (obj.spec.height > obs.depth.at(r, c)) {
                    obs.depth.at(r, c) = obj.spec.height;
                    obs.color.at(r, c) = static_cast<std::uint8_t>(obj.spec.color_id + 1);
                }
                if (is_goal) obs.goal_mask.at(r, c) = 1;
            }
        }
    }
    return obs;
}

GridU8 occupied_mask(const Observation& obs) {
    GridU8 m(obs.depth.rows, obs.depth.cols, 0);
    for (size_t i = 0; i < m.size(); ++i) m.data[i] = obs.depth.data[i] > 0.0 ? 1 : 0;
    return m;
}

std::vector<GridD> input_channels(const Observation& obs, const PerceptParams& params) {
    const int n = obs.depth.rows;
    std::vector<GridD> ch;
    ch.reserve(2 + params.colors);
    GridD depth(n, n, 0.0);
    for (size_t i = 0; i < depth.size(); ++i) depth.data[i] = obs.depth.data[i] / params.h_max;
    ch.push_back(std::move(depth));
    for (int color = 0; color < params.colors; ++color) {
        GridD plane(n, n, 0.0);
        for (size_t i = 0; i < plane.size(); ++i)
            plane.data[i] = obs.color.data[i] == color + 1 ? 1.0 : 0.0;
        ch.push_back(std::move(plane));
    }
    GridD mask(n, n, 0.0);
    for (size_t i = 0; i < mask.size(); ++i) mask.data[i] = obs.goal_mask.data[i] ? 1.0 : 0.0;
    ch.push_back(std::move(mask));
    return ch;
}

GridD rotate90(const GridD& img, int quarter_turns) {
    int q = ((quarter_turns % 4) + 4) % 4;
    GridD cur = img;
    const int n = img.rows;
    for (int t = 0; t < q; ++t) {
        GridD next(n, n, 0.0);
        // CCW quarter turn with row == +y: out(r, c) = in(n-1-c, r)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) next.at(r, c) = cur.at(n - 1 - c, r);
        cur = std::move(next);
    }
    return cur;
}

GridU8 rotate90(const GridU8& img, int quarter_turns) {
    int q = ((quarter_turns % 4) + 4) % 4;
    GridU8 cur = img;
    const int n = img.rows;
    for (int t = 0; t < q; ++t) {
        GridU8 next(n, n, 0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) next.at(r, c) = cur.at(n - 1 - c, r);
        cur = std::move(next);
    }
    return cur;
}

GridD bilinear_rotate(const GridD& img, double angle) {
    const int n = img.rows;
    if (img.cols != n) fail(ErrorCode::NonSquareGrid, "rotation requires a square grid");
    if (angle == 0.0) return img;
    GridD out(n, n, 0.0);
    const double ctr = (n - 1) * 0.5;
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double dx = c - ctr, dy = r - ctr;
            // inverse rotation of the output point
            double sx = ca * dx + sa * dy + ctr;
            double sy = -sa * dx + ca * dy + ctr;
            double fc = std::floor(sx), fr = std::floor(sy);
            int c0 = static_cast<int>(fc), r0 = static_cast<int>(fr);
            double tx = sx - fc, ty = sy - fr;
            auto sample = [&](int rr, int cc) -> double {
                return (rr >= 0 && rr < n && cc >= 0 && cc < n) ? img.at(rr, cc) : 0.0;
            };
            double v00 = sample(r0, c0), v01 = sample(r0, c0 + 1);
            double v10 = sample(r0 + 1, c0), v11 = sample(r0 + 1, c0 + 1);
            out.at(r, c) = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) +
                           ty * ((1.0 - tx) * v10 + tx * v11);
        }
    }
    return out;
}

namespace {
constexpr double kPi = 3.14159265358979323846;

GridD residual_rotate(const GridD& img, int r) {
    if (r == 0) return img;
    return bilinear_rotate(img, r * (kPi / 8.0));
}
}  // namespace

GridD rotate_steps_pre(const GridD& img, int steps) {
    int s = ((steps % kNumRotations) + kNumRotations) % kNumRotations;
    return residual_rotate(rotate90(img, s / 4), s % 4);
}

GridD rotate_steps_post(const GridD& img, int steps) {
    int s = ((steps % kNumRotations) + kNumRotations) % kNumRotations;
    return rotate90(residual_rotate(img, s % 4), s / 4);
}

RotatedStack rotate_stack(const std::vector<GridD>& channels) {
    RotatedStack stack;
    stack.channels = static_cast<int>(channels.size());
    stack.size = channels.empty() ? 0 : channels[0].rows;
    for (const auto& ch : channels)
        if (ch.rows != ch.cols) fail(ErrorCode::NonSquareGrid, "rotate_stack requires H == W");
    const size_t plane = static_cast<size_t>(stack.size) * stack.size;
    for (int k = 0; k < kNumRotations; ++k) {
        int steps = (kNumRotations - k) % kNumRotations;  // -k * 22.5 degrees
        stack.entries[k].resize(plane * channels.size());
        for (size_t ci = 0; ci < channels.size(); ++ci) {
            GridD rot = rotate_steps_pre(channels[ci], steps);
            std::copy(rot.data.begin(), rot.data.end(), stack.entries[k].begin() + ci * plane);
        }
    }
    return stack;
}

RotatedStack rotate_stack(const Observation& obs, const PerceptParams& params) {
    return rotate_stack(input_channels(obs, params));
}

GridU8 goal_ring(const GridU8& goal_mask, int ring_radius) {
    const int rows = goal_mask.rows, cols = goal_mask.cols;
    GridU8 ring(rows, cols, 0);
    const int rr2 = ring_radius * ring_radius;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (!goal_mask.at(r, c)) continue;
            for (int dr = -ring_radius; dr <= ring_radius; ++dr) {
                for (int dc = -ring_radius; dc <= ring_radius; ++dc) {
                    if (dr * dr + dc * dc > rr2) continue;
                    int nr = r + dr, nc = c + dc;
                    if (ring.in_bounds(nr, nc)) ring.at(nr, nc) = 1;
                }
            }
        }
    }
    for (size_t i = 0; i < ring.size(); ++i)
        if (goal_mask.data[i]) ring.data[i] = 0;
    return ring;
}

double occupancy_ratio(const Observation& obs, int ring_radius) {
    bool empty = true;
    for (auto m : obs.goal_mask.data)
        if (m) {
            empty = false;
            break;
        }
    if (empty) fail(ErrorCode::EmptyMask, "occupancy_ratio requires a non-empty goal mask");

    GridU8 ring = goal_ring(obs.goal_mask, ring_radius);
    long ring_cells = 0, occupied = 0;
    for (size_t i = 0; i < ring.size(); ++i) {
        if (!ring.data[i]) continue;
        ++ring_cells;
        if (obs.depth.data[i] > 0.0 && !obs.goal_mask.data[i]) ++occupied;
    }
    if (ring_cells == 0) return 0.0;
    return static_cast<double>(occupied) / static_cast<double>(ring_cells);
}

NeighborhoodChange neighborhood_change(const Observation& before, const Observation& after,
                                       const PerceptParams& params) {
    if (before.depth.rows != after.depth.rows || before.depth.cols != after.depth.cols)
        fail(ErrorCode::ShapeMismatch, "neighborhood_change requires matching grids");

    NeighborhoodChange result;
    GridU8 ring = goal_ring(before.goal_mask, params.ring_radius);
    for (size_t i = 0; i < ring.size(); ++i) {
        if (!ring.data[i]) continue;
        if (std::abs(before.depth.data[i] - after.depth.data[i]) > params.depth_tolerance)
            ++result.changed_cells;
    }
    result.o_decreased =
        occupancy_ratio(before, params.ring_radius) - occupancy_ratio(after, params.ring_radius);
    return result;
}

void dump_pgm(const GridD& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    double lo = g.data.empty() ? 0.0 : *std::min_element(g.data.begin(), g.data.end());
    double hi = g.data.empty() ? 1.0 : *std::max_element(g.data.begin(), g.data.end());
    double span = hi > lo ? hi - lo : 1.0;
    out << "P5\n" << g.cols << " " << g.rows << "\n255\n";
    // row 0 is y-min; write top row first so images look upright
    for (int r = g.rows - 1; r >= 0; --r) {
        for (int c = 0; c < g.cols; ++c) {
            auto b = static_cast<unsigned char>(std::lround(255.0 * (g.at(r, c) - lo) / span));
            out.put(static_cast<char>(b));
        }
    }
}

void dump_csv(const GridD& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    char buf[40];
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.at(r, c));
            out << buf << (c + 1 == g.cols ? "\n" : ",");
        }
    }
}

}  // namespace pg::percept
