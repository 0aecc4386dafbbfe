#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "pushgrasp/kernels.hpp"

// AVX2/FMA variants. Per-element accumulation order and the 4-lane
// reduction scheme match the scalar reference, so results are bit-identical.

namespace pg::kernels {
namespace {

inline double combine_lanes(__m256d acc) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

void axpy_row(double wv, const double* src, double* dst, int n) {
    const __m256d wvec = _mm256_set1_pd(wv);
    int c = 0;
    for (; c + 4 <= n; c += 4) {
        __m256d d = _mm256_loadu_pd(dst + c);
        __m256d s = _mm256_loadu_pd(src + c);
        _mm256_storeu_pd(dst + c, _mm256_fmadd_pd(wvec, s, d));
    }
    for (; c < n; ++c) dst[c] = std::fma(wv, src[c], dst[c]);
}

void conv3x3_fwd_avx2(const double* in, int cin, int h, int w, const double* wgt,
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
                    if (c_lo >= c_hi) continue;
                    for (int r = 0; r < h; ++r) {
                        const int rin = r + dy;
                        if (rin < 0 || rin >= h) continue;
                        axpy_row(wv, in_plane + static_cast<std::size_t>(rin) * w + dx + c_lo,
                                 out_plane + static_cast<std::size_t>(r) * w + c_lo, c_hi - c_lo);
                    }
                }
            }
        }
    }
}

void conv3x3_bwd_data_avx2(const double* gout, const double* wgt, int cout, int cin, int h,
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
                    if (c_lo >= c_hi) continue;
                    for (int r = 0; r < h; ++r) {
                        const int rin = r + dy;
                        if (rin < 0 || rin >= h) continue;
                        axpy_row(wv, gout_plane + static_cast<std::size_t>(r) * w + c_lo,
                                 gin_plane + static_cast<std::size_t>(rin) * w + dx + c_lo,
                                 c_hi - c_lo);
                    }
                }
            }
        }
    }
}

// 4-lane reduction over one row segment; lanes continue the scalar
// reference's (index & 3) assignment because each row restarts at lane 0.
inline void reduce_rows_dot(const double* x, const double* g, int n, __m256d& acc) {
    int c = 0;
    for (; c + 4 <= n; c += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + c), _mm256_loadu_pd(g + c), acc);
    if (c < n) {
        alignas(32) double lane[4];
        _mm256_store_pd(lane, acc);
        for (; c < n; ++c) lane[c & 3] = std::fma(x[c], g[c], lane[c & 3]);
        acc = _mm256_load_pd(lane);
    }
}

inline void reduce_rows_sum(const double* g, int n, __m256d& acc) {
    int c = 0;
    for (; c + 4 <= n; c += 4) acc = _mm256_add_pd(_mm256_loadu_pd(g + c), acc);
    if (c < n) {
        alignas(32) double lane[4];
        _mm256_store_pd(lane, acc);
        for (; c < n; ++c) lane[c & 3] += g[c];
        acc = _mm256_load_pd(lane);
    }
}

void conv3x3_bwd_wgt_avx2(const double* in, const double* gout, int cin, int cout, int h, int w,
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
                    __m256d acc = _mm256_setzero_pd();
                    for (int r = 0; r < h; ++r) {
                        const int rin = r + dy;
                        if (rin < 0 || rin >= h) continue;
                        reduce_rows_dot(in_plane + static_cast<std::size_t>(rin) * w + dx + c_lo,
                                        gout_plane + static_cast<std::size_t>(r) * w + c_lo,
                                        c_hi - c_lo, acc);
                    }
                    gw[(((co * cin) + ci) * 9) + ky * 3 + kx] = combine_lanes(acc);
                }
            }
        }
        __m256d acc = _mm256_setzero_pd();
        for (int r = 0; r < h; ++r)
            reduce_rows_sum(gout_plane + static_cast<std::size_t>(r) * w, w, acc);
        gb[co] = combine_lanes(acc);
    }
}

void conv1x1_fwd_avx2(const double* in, int cin, int h, int w, const double* wgt,
                      const double* bias, double* out, int cout) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        double* out_plane = out + co * plane;
        std::fill(out_plane, out_plane + plane, bias[co]);
        for (int ci = 0; ci < cin; ++ci)
            axpy_row(wgt[co * cin + ci], in + ci * plane, out_plane, static_cast<int>(plane));
    }
}

void conv1x1_bwd_data_avx2(const double* gout, const double* wgt, int cout, int cin, int h,
                           int w, double* gin) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::fill(gin, gin + static_cast<std::size_t>(cin) * plane, 0.0);
    for (int ci = 0; ci < cin; ++ci) {
        double* gin_plane = gin + ci * plane;
        for (int co = 0; co < cout; ++co)
            axpy_row(wgt[co * cin + ci], gout + co * plane, gin_plane, static_cast<int>(plane));
    }
}

void conv1x1_bwd_wgt_avx2(const double* in, const double* gout, int cin, int cout, int h, int w,
                          double* gw, double* gb) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int co = 0; co < cout; ++co) {
        const double* gout_plane = gout + co * plane;
        for (int ci = 0; ci < cin; ++ci) {
            __m256d acc = _mm256_setzero_pd();
            reduce_rows_dot(in + ci * plane, gout_plane, static_cast<int>(plane), acc);
            gw[co * cin + ci] = combine_lanes(acc);
        }
        __m256d acc = _mm256_setzero_pd();
        reduce_rows_sum(gout_plane, static_cast<int>(plane), acc);
        gb[co] = combine_lanes(acc);
    }
}

void relu_fwd_avx2(const double* z, double* a, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(a + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
    for (; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_bwd_avx2(const double* z, double* g, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(g + i, _mm256_and_pd(_mm256_loadu_pd(g + i), mask));
    }
    for (; i < n; ++i)
        if (z[i] <= 0.0) g[i] = 0.0;
}

void adam_step_avx2(double* p, const double* g, double* m, double* v, std::size_t n, long step,
                    double lr, double beta1, double beta2, double eps, double weight_decay) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    const __m256d vwd = _mm256_set1_pd(weight_decay);
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vob1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d vob2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d vbc1 = _mm256_set1_pd(bc1);
    const __m256d vbc2 = _mm256_set1_pd(bc2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d pv = _mm256_loadu_pd(p + i);
        __m256d grad = _mm256_fmadd_pd(vwd, pv, _mm256_loadu_pd(g + i));
        __m256d mv = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i), _mm256_mul_pd(vob1, grad));
        __m256d g2 = _mm256_mul_pd(grad, grad);
        __m256d vv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i), _mm256_mul_pd(vob2, g2));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        __m256d mhat = _mm256_div_pd(mv, vbc1);
        __m256d vhat = _mm256_div_pd(vv, vbc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d upd = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(pv, upd));
    }
    for (; i < n; ++i) {
        const double grad = std::fma(weight_decay, p[i], g[i]);
        m[i] = std::fma(beta1, m[i], (1.0 - beta1) * grad);
        v[i] = std::fma(beta2, v[i], (1.0 - beta2) * (grad * grad));
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Backend* avx2_backend_impl() {
    static const Backend backend{
        "avx2",
        conv3x3_fwd_avx2,
        conv3x3_bwd_data_avx2,
        conv3x3_bwd_wgt_avx2,
        conv1x1_fwd_avx2,
        conv1x1_bwd_data_avx2,
        conv1x1_bwd_wgt_avx2,
        relu_fwd_avx2,
        relu_bwd_avx2,
        adam_step_avx2,
    };
    return &backend;
}

}  // namespace pg::kernels
