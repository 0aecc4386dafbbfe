#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pushgrasp/common.hpp"
#include "pushgrasp/percept.hpp"

namespace pg::qfunc {

/// Fully convolutional trunk: three 3x3 conv+ReLU layers (the last one
/// dilated) and a 1x1 head, evaluated per rotation entry. Grid size is
/// free; channel widths are fixed at construction.
struct NetConfig {
    int in_channels = 10;
    int c1 = 14;
    int c2 = 14;
    int c3 = 14;
    int dilation3 = 2;

    bool operator==(const NetConfig&) const = default;
};

struct OptimConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
    double weight_decay = 2e-5;
    double huber_delta = 1.0;
};

/// Flat parameter vector plus Adam moments. Layout:
/// [w1 b1 w2 b2 w3 b3 wh bh].
struct ParamSet {
    NetConfig cfg;
    std::vector<double> w;
    std::vector<double> adam_m;
    std::vector<double> adam_v;
    long adam_step = 0;

    static ParamSet init(const NetConfig& cfg, std::uint64_t seed);
    size_t size() const { return w.size(); }
    std::uint64_t checksum() const;
};

size_t param_count(const NetConfig& cfg);

struct QMapSet {
    PrimitiveKind kind = PrimitiveKind::Grasp;
    std::array<GridD, kNumRotations> maps;
};

QMapSet forward(const ParamSet& params, const percept::RotatedStack& stack, PrimitiveKind kind);

/// Trunk output for one rotation entry, back-rotated into the common frame.
GridD forward_single(const ParamSet& params, const percept::RotatedStack& stack, int rotation);

struct PixelRef {
    int rotation = 0;
    int row = 0;
    int col = 0;
};

struct MaxQ {
    double value = 0.0;
    PixelRef pixel;
};

/// Maximum over all 16 maps; ties break lexicographically on (k, row, col).
MaxQ max_q(const QMapSet& q);
/// Maximum restricted to mask cells; nullopt when the mask is empty.
std::optional<MaxQ> max_q_in_mask(const QMapSet& q, const GridU8& mask);

double td_target(double reward, double next_q_max, double gamma);

double huber(double err, double delta);
double huber_grad(double err, double delta);

struct TrainDiagnostics {
    GridD final_grad_map;        // gradient w.r.t. the back-rotated Q map
    std::vector<double> grads;   // gradient w.r.t. the flat parameter vector
};

/// One TD step on the executed pixel: Huber loss between the Q value at
/// `pixel` (in the common frame) and target y, backward through that pixel
/// only, one Adam update. Returns the loss before the update.
double train_on(ParamSet& params, const percept::RotatedStack& stack, const PixelRef& pixel,
                double y, const OptimConfig& optim, TrainDiagnostics* diag = nullptr);

void save_checkpoint(const ParamSet& params, int grid_size, const std::string& path);
ParamSet load_checkpoint(const std::string& path, const NetConfig& expected_cfg,
                         int expected_grid);

}  // namespace pg::qfunc
