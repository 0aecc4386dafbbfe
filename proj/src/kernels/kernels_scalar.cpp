#include <algorithm>
#include <cmath>
#include <cstring>

#include "pushgrasp/kernels.hpp"

// Reference kernels. std::fma keeps the rounding identical to the FMA
// instructions the SIMD backends use.

namespace pg::kernels {
namespace {

void conv3x3_fwd_scalar(const double* in, int cin, int h, int w, const double* wgt,
                        const double* bias, double* out, int cout, int dil) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        double* out_plane = out + co * plane;
        std::fill(out_plane, out_plane + plane, bias[co]);
        for (int ci = 0; ci < cin; ++ci) {
            const double* in_plane = in + ci * plane;
            const double* wk = wgt + ((co * cin) + ci) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                const int dy = (ky - 1) * dil;
                for (int kx = 0; kx < 3; ++kx) {
                    const int dx = (kx - 1) * dil;
                    const double wv = wk[ky * 3 + kx];
                    const int c_lo = std::max(0, -dx);
                    const int c_hi = std::min(w, w - dx);
                    for (int r = 0; r < h; ++r) {
                        const int rin = r + dy;
                        if (rin < 0 || rin >= h) continue;
                        const double* src = in_plane + static_cast<std::size_t>(rin) * w + dx;
                        double* dst = out_plane + static_cast<std::size_t>(r) * w;
                        for (int c = c_lo; c < c_hi; ++c) dst[c] = std::fma(wv, src[c], dst[c]);
                    }
                }
            }
        }
    }
}

void conv3x3_bwd_data_scalar(const double* gout, const double* wgt, int cout, int cin, int h,
                             int w, double* gin, int dil) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::fill(gin, gin + static_cast<std::size_t>(cin) * plane, 0.0);
    for (int ci = 0; ci < cin; ++ci) {
        double* gin_plane = gin + ci * plane;
        for (int co = 0; co < cout; ++co) {
            const double* gout_plane = gout + co * plane;
            const double* wk = wgt + ((co * cin) + ci) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                const int dy = (ky - 1) * dil;
                for (int kx = 0; kx < 3; ++kx) {
                    const int dx = (kx - 1) * dil;
                    const double wv = wk[ky * 3 + kx];
                    const int c_lo = std::max(0, -dx);
                    const int c_hi = std::min(w, w - dx);
                    for (int r = 0; r < h; ++r) {
                        const int rin = r + dy;
                        if (rin < 0 || rin >= h) continue;
                        double* dst = gin_plane + static_cast<std::size_t>(rin) * w + dx;
                        const double* src = gout_plane + static_cast<std::size_t>(r) * w;
                        for (int c = c_lo; c < c_hi; ++c) dst[c] = std::fma(wv, src[c], dst[c]);
                    }
                }
            }
        }
    }
}

// Canonical 4-lane reduction: lane = index & 3 within each row segment,
// combined as (l0+l2)+(l1+l3). SIMD backends must match this exactly.
void conv3x3_bwd_wgt_scalar(const double* in, const double* gout, int cin, int cout, int h, int w,
                            double* gw, double* gb, int dil) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        const double* gout_plane = gout + co * plane;
        for (int ci = 0; ci < cin; ++ci) {
            const double* in_plane = in + ci * plane;
            for (int ky = 0; ky < 3; ++ky) {
                const int dy = (ky - 1) * dil;
                for (int kx = 0; kx < 3; ++kx) {
                    const int dx = (kx - 1) * dil;
                    const int c_lo = std::max(0, -dx);
                    const int c_hi = std::min(w, w - dx);
                    double acc[4] = {0.0, 0.0, 0.0, 0.0};
                    for (int r = 0; r < h; ++r) {
                        const int rin = r + dy;
                        if (rin < 0 || rin >= h) continue;
                        const double* x = in_plane + static_cast<std::size_t>(rin) * w + dx;
                        const double* g = gout_plane + static_cast<std::size_t>(r) * w;
                        for (int c = c_lo; c < c_hi; ++c)
                            acc[(c - c_lo) & 3] = std::fma(x[c], g[c], acc[(c - c_lo) & 3]);
                    }
                    gw[(((co * cin) + ci) * 9) + ky * 3 + kx] =
                        (acc[0] + acc[2]) + (acc[1] + acc[3]);
                }
            }
        }
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        for (int r = 0; r < h; ++r) {
            const double* g = gout_plane + static_cast<std::size_t>(r) * w;
            for (int c = 0; c < w; ++c) acc[c & 3] += g[c];
        }
        gb[co] = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    }
}

void conv1x1_fwd_scalar(const double* in, int cin, int h, int w, const double* wgt,
                        const double* bias, double* out, int cout) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        double* out_plane = out + co * plane;
        std::fill(out_plane, out_plane + plane, bias[co]);
        for (int ci = 0; ci < cin; ++ci) {
            const double wv = wgt[co * cin + ci];
            const double* in_plane = in + ci * plane;
            for (std::size_t i = 0; i < plane; ++i)
                out_plane[i] = std::fma(wv, in_plane[i], out_plane[i]);
        }
    }
}

void conv1x1_bwd_data_scalar(const double* gout, const double* wgt, int cout, int cin, int h,
                             int w, double* gin) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::fill(gin, gin + static_cast<std::size_t>(cin) * plane, 0.0);
    for (int ci = 0; ci < cin; ++ci) {
        double* gin_plane = gin + ci * plane;
        for (int co = 0; co < cout; ++co) {
            const double wv = wgt[co * cin + ci];
            const double* gout_plane = gout + co * plane;
            for (std::size_t i = 0; i < plane; ++i)
                gin_plane[i] = std::fma(wv, gout_plane[i], gin_plane[i]);
        }
    }
}

void conv1x1_bwd_wgt_scalar(const double* in, const double* gout, int cin, int cout, int h,
                            int w, double* gw, double* gb) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        const double* gout_plane = gout + co * plane;
        for (int ci = 0; ci < cin; ++ci) {
            const double* in_plane = in + ci * plane;
            double acc[4] = {0.0, 0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < plane; ++i)
                acc[i & 3] = std::fma(in_plane[i], gout_plane[i], acc[i & 3]);
            gw[co * cin + ci] = (acc[0] + acc[2]) + (acc[1] + acc[3]);
        }
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < plane; ++i) acc[i & 3] += gout_plane[i];
        gb[co] = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    }
}

void relu_fwd_scalar(const double* z, double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_bwd_scalar(const double* z, double* g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (z[i] <= 0.0) g[i] = 0.0;
}

void adam_step_scalar(double* p, const double* g, double* m, double* v, std::size_t n, long step,
                      double lr, double beta1, double beta2, double eps, double weight_decay) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < n; ++i) {
        const double grad = std::fma(weight_decay, p[i], g[i]);
        m[i] = std::fma(beta1, m[i], (1.0 - beta1) * grad);
        v[i] = std::fma(beta2, v[i], (1.0 - beta2) * (grad * grad));
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",
        conv3x3_fwd_scalar,
        conv3x3_bwd_data_scalar,
        conv3x3_bwd_wgt_scalar,
        conv1x1_fwd_scalar,
        conv1x1_bwd_data_scalar,
        conv1x1_bwd_wgt_scalar,
        relu_fwd_scalar,
        relu_bwd_scalar,
        adam_step_scalar,
    };
    return backend;
}

}  // namespace pg::kernels
