#include "pushgrasp/qfunc.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "pushgrasp/kernels.hpp"
#include "pushgrasp/rng.hpp"

namespace pg::qfunc {

namespace {

struct Layout {
    size_t w1, b1, w2, b2, w3, b3, wh, bh, total;
};

Layout layout_of(const NetConfig& cfg) {
    Layout l{};
    size_t off = 0;
    l.w1 = off;
    off += static_cast<size_t>(cfg.c1) * cfg.in_channels * 9;
    l.b1 = off;
    off += cfg.c1;
    l.w2 = off;
    off += static_cast<size_t>(cfg.c2) * cfg.c1 * 9;
    l.b2 = off;
    off += cfg.c2;
    l.w3 = off;
    off += static_cast<size_t>(cfg.c3) * cfg.c2 * 9;
    l.b3 = off;
    off += cfg.c3;
    l.wh = off;
    off += cfg.c3;
    l.bh = off;
    off += 1;
    l.total = off;
    return l;
}

struct Activations {
    std::vector<double> z1, a1, z2, a2, z3, a3, q;
};

void trunk_forward(const ParamSet& p, const double* in, int n, Activations& acts) {
    const auto& k = kernels::active();
    const Layout l = layout_of(p.cfg);
    const size_t plane = static_cast<size_t>(n) * n;
    const NetConfig& c = p.cfg;
    acts.z1.resize(plane * c.c1);
    acts.a1.resize(plane * c.c1);
    acts.z2.resize(plane * c.c2);
    acts.a2.resize(plane * c.c2);
    acts.z3.resize(plane * c.c3);
    acts.a3.resize(plane * c.c3);
    acts.q.resize(plane);

    k.conv3x3_fwd(in, c.in_channels, n, n, &p.w[l.w1], &p.w[l.b1], acts.z1.data(), c.c1, 1);
    k.relu_fwd(acts.z1.data(), acts.a1.data(), acts.z1.size());
    k.conv3x3_fwd(acts.a1.data(), c.c1, n, n, &p.w[l.w2], &p.w[l.b2], acts.z2.data(), c.c2, 1);
    k.relu_fwd(acts.z2.data(), acts.a2.data(), acts.z2.size());
    k.conv3x3_fwd(acts.a2.data(), c.c2, n, n, &p.w[l.w3], &p.w[l.b3], acts.z3.data(), c.c3,
                  c.dilation3);
    k.relu_fwd(acts.z3.data(), acts.a3.data(), acts.z3.size());
    k.conv1x1_fwd(acts.a3.data(), c.c3, n, n, &p.w[l.wh], &p.w[l.bh], acts.q.data(), 1);
}

constexpr double kPi = 3.14159265358979323846;

// One CCW quarter turn reads in(n-1-c, r); iterate to invert several turns.
void permute_source(int quarter_turns, int n, int& r, int& c) {
    for (int t = 0; t < quarter_turns; ++t) {
        int nr = n - 1 - c;
        int nc = r;
        r = nr;
        c = nc;
    }
}

struct BackRotTaps {
    int count = 0;
    int rows[4] = {};
    int cols[4] = {};
    double wts[4] = {};
    double v00 = 0, v01 = 0, v10 = 0, v11 = 0;
    double tx = 0, ty = 0;
    bool bilinear = false;
};

// Taps of the back-rotation by +rotation*22.5 deg at output pixel (row,col):
// the rotated-frame pixels read and their weights. The value expression
// matches percept::bilinear_rotate exactly.
BackRotTaps back_rotation_taps(const GridD& qmap, int rotation, int row, int col) {
    const int n = qmap.rows;
    const int q = rotation / 4;
    const int r_res = rotation % 4;
    int pr = row, pc = col;
    permute_source(q, n, pr, pc);

    BackRotTaps taps;
    if (r_res == 0) {
        taps.count = 1;
        taps.rows[0] = pr;
        taps.cols[0] = pc;
        taps.wts[0] = 1.0;
        taps.v00 = qmap.at(pr, pc);
        return taps;
    }
    taps.bilinear = true;
    const double ctr = (n - 1) * 0.5;
    const double angle = r_res * (kPi / 8.0);
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double dx = pc - ctr, dy = pr - ctr;
    const double sx = ca * dx + sa * dy + ctr;
    const double sy = -sa * dx + ca * dy + ctr;
    const double fc = std::floor(sx), fr = std::floor(sy);
    const int c0 = static_cast<int>(fc), r0 = static_cast<int>(fr);
    taps.tx = sx - fc;
    taps.ty = sy - fr;
    auto val = [&](int rr, int cc) {
        return (rr >= 0 && rr < n && cc >= 0 && cc < n) ? qmap.at(rr, cc) : 0.0;
    };
    taps.v00 = val(r0, c0);
    taps.v01 = val(r0, c0 + 1);
    taps.v10 = val(r0 + 1, c0);
    taps.v11 = val(r0 + 1, c0 + 1);
    const int rr[4] = {r0, r0, r0 + 1, r0 + 1};
    const int cc[4] = {c0, c0 + 1, c0, c0 + 1};
    const double ww[4] = {(1.0 - taps.ty) * (1.0 - taps.tx), (1.0 - taps.ty) * taps.tx,
                          taps.ty * (1.0 - taps.tx), taps.ty * taps.tx};
    for (int i = 0; i < 4; ++i) {
        if (rr[i] < 0 || rr[i] >= n || cc[i] < 0 || cc[i] >= n) continue;
        taps.rows[taps.count] = rr[i];
        taps.cols[taps.count] = cc[i];
        taps.wts[taps.count] = ww[i];
        ++taps.count;
    }
    return taps;
}

double taps_value(const BackRotTaps& t) {
    if (!t.bilinear) return t.v00;
    return (1.0 - t.ty) * ((1.0 - t.tx) * t.v00 + t.tx * t.v01) +
           t.ty * ((1.0 - t.tx) * t.v10 + t.tx * t.v11);
}

}  // namespace

size_t param_count(const NetConfig& cfg) { return layout_of(cfg).total; }

ParamSet ParamSet::init(const NetConfig& cfg, std::uint64_t seed) {
    ParamSet p;
    p.cfg = cfg;
    const Layout l = layout_of(cfg);
    p.w.assign(l.total, 0.0);
    p.adam_m.assign(l.total, 0.0);
    p.adam_v.assign(l.total, 0.0);

    Rng rng(seed);
    auto fill = [&](size_t off, size_t count, int fan_in) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (size_t i = 0; i < count; ++i) p.w[off + i] = rng.uniform(-bound, bound);
    };
    fill(l.w1, l.b1 - l.w1, cfg.in_channels * 9);
    fill(l.b1, l.w2 - l.b1, cfg.in_channels * 9);
    fill(l.w2, l.b2 - l.w2, cfg.c1 * 9);
    fill(l.b2, l.w3 - l.b2, cfg.c1 * 9);
    fill(l.w3, l.b3 - l.w3, cfg.c2 * 9);
    fill(l.b3, l.wh - l.b3, cfg.c2 * 9);
    fill(l.wh, l.bh - l.wh, cfg.c3);
    p.w[l.bh] = 0.0;  // head bias starts at zero
    return p;
}

std::uint64_t ParamSet::checksum() const {
    std::uint64_t h = fnv1a(w.data(), w.size() * sizeof(double));
    h = fnv1a(adam_m.data(), adam_m.size() * sizeof(double), h);
    h = fnv1a(adam_v.data(), adam_v.size() * sizeof(double), h);
    h = fnv1a(&adam_step, sizeof(adam_step), h);
    return h;
}

GridD forward_single(const ParamSet& params, const percept::RotatedStack& stack, int rotation) {
    if (stack.channels != params.cfg.in_channels)
        fail(ErrorCode::ShapeMismatch, "stack channels do not match the network");
    const int n = stack.size;
    Activations acts;
    trunk_forward(params, stack.entry(rotation), n, acts);
    GridD qmap(n, n, 0.0);
    std::copy(acts.q.begin(), acts.q.end(), qmap.data.begin());
    return percept::rotate_steps_post(qmap, rotation);
}

QMapSet forward(const ParamSet& params, const percept::RotatedStack& stack, PrimitiveKind kind) {
    if (stack.channels != params.cfg.in_channels)
        fail(ErrorCode::ShapeMismatch, "stack channels do not match the network");
    QMapSet out;
    out.kind = kind;
    const int n = stack.size;
    Activations acts;
    for (int k = 0; k < kNumRotations; ++k) {
        trunk_forward(params, stack.entry(k), n, acts);
        GridD qmap(n, n, 0.0);
        std::copy(acts.q.begin(), acts.q.end(), qmap.data.begin());
        out.maps[k] = percept::rotate_steps_post(qmap, k);
    }
    return out;
}

MaxQ max_q(const QMapSet& q) {
    MaxQ best;
    best.value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kNumRotations; ++k) {
        const GridD& m = q.maps[k];
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c)
                if (m.at(r, c) > best.value) best = {m.at(r, c), {k, r, c}};
    }
    return best;
}

std::optional<MaxQ> max_q_in_mask(const QMapSet& q, const GridU8& mask) {
    MaxQ best;
    best.value = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int k = 0; k < kNumRotations; ++k) {
        const GridD& m = q.maps[k];
        for (int r = 0; r < m.rows; ++r) {
            for (int c = 0; c < m.cols; ++c) {
                if (!mask.at(r, c)) continue;
                any = true;
                if (m.at(r, c) > best.value) best = {m.at(r, c), {k, r, c}};
            }
        }
    }
    if (!any) return std::nullopt;
    return best;
}

double td_target(double reward, double next_q_max, double gamma) {
    if (gamma < 0.0 || gamma >= 1.0) fail(ErrorCode::UsageError, "gamma must be in [0, 1)");
    return reward + gamma * next_q_max;
}

double huber(double err, double delta) {
    double a = std::abs(err);
    if (a <= delta) return 0.5 * err * err;
    return delta * (a - 0.5 * delta);
}

double huber_grad(double err, double delta) {
    if (err > delta) return delta;
    if (err < -delta) return -delta;
    return err;
}

double train_on(ParamSet& params, const percept::RotatedStack& stack, const PixelRef& pixel,
                double y, const OptimConfig& optim, TrainDiagnostics* diag) {
    const int n = stack.size;
    if (stack.channels != params.cfg.in_channels)
        fail(ErrorCode::ShapeMismatch, "stack channels do not match the network");
    if (pixel.rotation < 0 || pixel.rotation >= kNumRotations || pixel.row < 0 ||
        pixel.row >= n || pixel.col < 0 || pixel.col >= n)
        fail(ErrorCode::UsageError, "executed pixel out of bounds");
    if (!std::isfinite(y)) fail(ErrorCode::NonFiniteLoss, "TD target is not finite");

    const auto& k = kernels::active();
    const NetConfig& c = params.cfg;
    const Layout l = layout_of(c);
    const size_t plane = static_cast<size_t>(n) * n;

    Activations acts;
    trunk_forward(params, stack.entry(pixel.rotation), n, acts);
    GridD qmap(n, n, 0.0);
    std::copy(acts.q.begin(), acts.q.end(), qmap.data.begin());

    BackRotTaps taps = back_rotation_taps(qmap, pixel.rotation, pixel.row, pixel.col);
    const double q_exec = taps_value(taps);
    const double err = q_exec - y;
    const double loss_value = huber(err, optim.huber_delta);
    if (!std::isfinite(loss_value))
        fail(ErrorCode::NonFiniteLoss, "loss is not finite; step aborted");
    const double dl = huber_grad(err, optim.huber_delta);

    // Gradient w.r.t. the common-frame output map is a delta at the
    // executed pixel; everything else backpropagates zero.
    if (diag) {
        diag->final_grad_map = GridD(n, n, 0.0);
        diag->final_grad_map.at(pixel.row, pixel.col) = dl;
    }

    // Transpose of the back-rotation: splat into the rotated-frame map.
    std::vector<double> gq(plane, 0.0);
    for (int i = 0; i < taps.count; ++i)
        gq[static_cast<size_t>(taps.rows[i]) * n + taps.cols[i]] += taps.wts[i] * dl;

    std::vector<double> grads(l.total, 0.0);
    std::vector<double> ga3(plane * c.c3), ga2(plane * c.c2), ga1(plane * c.c1);

    k.conv1x1_bwd_wgt(acts.a3.data(), gq.data(), c.c3, 1, n, n, &grads[l.wh], &grads[l.bh]);
    k.conv1x1_bwd_data(gq.data(), &params.w[l.wh], 1, c.c3, n, n, ga3.data());
    k.relu_bwd(acts.z3.data(), ga3.data(), ga3.size());
    k.conv3x3_bwd_wgt(acts.a2.data(), ga3.data(), c.c2, c.c3, n, n, &grads[l.w3], &grads[l.b3],
                      c.dilation3);
    k.conv3x3_bwd_data(ga3.data(), &params.w[l.w3], c.c3, c.c2, n, n, ga2.data(), c.dilation3);
    k.relu_bwd(acts.z2.data(), ga2.data(), ga2.size());
    k.conv3x3_bwd_wgt(acts.a1.data(), ga2.data(), c.c1, c.c2, n, n, &grads[l.w2], &grads[l.b2], 1);
    k.conv3x3_bwd_data(ga2.data(), &params.w[l.w2], c.c2, c.c1, n, n, ga1.data(), 1);
    k.relu_bwd(acts.z1.data(), ga1.data(), ga1.size());
    k.conv3x3_bwd_wgt(stack.entry(pixel.rotation), ga1.data(), c.in_channels, c.c1, n, n,
                      &grads[l.w1], &grads[l.b1], 1);

    if (diag) diag->grads = grads;

    ++params.adam_step;
    k.adam_step(params.w.data(), grads.data(), params.adam_m.data(), params.adam_v.data(),
                l.total, params.adam_step, optim.lr, optim.beta1, optim.beta2, optim.eps,
                optim.weight_decay);
    return loss_value;
}

namespace {
constexpr char kMagic[8] = {'P', 'G', 'Q', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;
}  // namespace

void save_checkpoint(const ParamSet& params, int grid_size, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write checkpoint '" + path + "'");
    std::string body;
    auto append = [&body](const void* p, size_t nbytes) {
        body.append(static_cast<const char*>(p), nbytes);
    };
    append(kMagic, sizeof(kMagic));
    append(&kCkptVersion, sizeof(kCkptVersion));
    std::int32_t meta[6] = {params.cfg.in_channels, params.cfg.c1, params.cfg.c2,
                            params.cfg.c3, params.cfg.dilation3, grid_size};
    append(meta, sizeof(meta));
    std::int64_t step = params.adam_step;
    append(&step, sizeof(step));
    std::uint64_t count = params.w.size();
    append(&count, sizeof(count));
    append(params.w.data(), params.w.size() * sizeof(double));
    append(params.adam_m.data(), params.adam_m.size() * sizeof(double));
    append(params.adam_v.data(), params.adam_v.size() * sizeof(double));
    std::uint64_t digest = fnv1a(body.data(), body.size());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.write(reinterpret_cast<const char*>(&digest), sizeof(digest));
    if (!out) fail(ErrorCode::IoError, "short write for checkpoint '" + path + "'");
}

ParamSet load_checkpoint(const std::string& path, const NetConfig& expected_cfg,
                         int expected_grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::CheckpointNotFound, "checkpoint '" + path + "' not found");
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (blob.size() < sizeof(kMagic) + sizeof(kCkptVersion) + sizeof(std::uint64_t))
        fail(ErrorCode::CorruptFile, "checkpoint '" + path + "' is truncated");

    std::uint64_t digest_stored;
    std::memcpy(&digest_stored, blob.data() + blob.size() - sizeof(digest_stored),
                sizeof(digest_stored));
    const size_t body_size = blob.size() - sizeof(digest_stored);
    if (fnv1a(blob.data(), body_size) != digest_stored)
        fail(ErrorCode::CorruptFile, "checkpoint '" + path + "' failed its checksum");

    size_t off = 0;
    auto read = [&](void* p, size_t nbytes) {
        if (off + nbytes > body_size)
            fail(ErrorCode::CorruptFile, "checkpoint '" + path + "' is truncated");
        std::memcpy(p, blob.data() + off, nbytes);
        off += nbytes;
    };
    char magic[8];
    read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        fail(ErrorCode::CorruptFile, "checkpoint '" + path + "' has a bad magic header");
    std::uint32_t version;
    read(&version, sizeof(version));
    if (version != kCkptVersion)
        fail(ErrorCode::VersionMismatch, "checkpoint '" + path + "' has version " +
                                             std::to_string(version) + ", expected " +
                                             std::to_string(kCkptVersion));
    std::int32_t meta[6];
    read(meta, sizeof(meta));
    NetConfig cfg{meta[0], meta[1], meta[2], meta[3], meta[4]};
    if (!(cfg == expected_cfg) || meta[5] != expected_grid)
        fail(ErrorCode::VersionMismatch,
             "checkpoint '" + path + "' was written for a different network or grid size");

    ParamSet params;
    params.cfg = cfg;
    std::int64_t step;
    read(&step, sizeof(step));
    params.adam_step = step;
    std::uint64_t count;
    read(&count, sizeof(count));
    if (count != param_count(cfg))
        fail(ErrorCode::CorruptFile, "checkpoint '" + path + "' has a bad parameter count");
    params.w.resize(count);
    params.adam_m.resize(count);
    params.adam_v.resize(count);
    read(params.w.data(), count * sizeof(double));
    read(params.adam_m.data(), count * sizeof(double));
    read(params.adam_v.data(), count * sizeof(double));
    if (off != body_size)
        fail(ErrorCode::CorruptFile, "checkpoint '" + path + "' has trailing bytes");
    return params;
}

}  // namespace pg::qfunc
