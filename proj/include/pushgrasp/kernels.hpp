#pragma once

#include <cstddef>
#include <string>

namespace pg::kernels {

/// Dense numeric kernels behind the Q-function. Planar CHW layout,
/// double precision, zero padding, stride 1.
///
/// Every backend must produce bit-identical results: accumulation uses
/// fused multiply-add in a fixed per-element order, and reductions use a
/// canonical 4-lane scheme combined as (l0+l2)+(l1+l3). The unit suite
/// asserts exact equality between backends on random tensors.
struct Backend {
    const char* name;

    void (*conv3x3_fwd)(const double* in, int cin, int h, int w, const double* wgt,
                        const double* bias, double* out, int cout, int dilation);
    void (*conv3x3_bwd_data)(const double* gout, const double* wgt, int cout, int cin, int h,
                             int w, double* gin, int dilation);
    void (*conv3x3_bwd_wgt)(const double* in, const double* gout, int cin, int cout, int h, int w,
                            double* gw, double* gb, int dilation);
    void (*conv1x1_fwd)(const double* in, int cin, int h, int w, const double* wgt,
                        const double* bias, double* out, int cout);
    void (*conv1x1_bwd_data)(const double* gout, const double* wgt, int cout, int cin, int h,
                             int w, double* gin);
    void (*conv1x1_bwd_wgt)(const double* in, const double* gout, int cin, int cout, int h, int w,
                            double* gw, double* gb);
    void (*relu_fwd)(const double* z, double* a, std::size_t n);
    void (*relu_bwd)(const double* z, double* g, std::size_t n);
    void (*adam_step)(double* p, const double* g, double* m, double* v, std::size_t n,
                      long step, double lr, double beta1, double beta2, double eps,
                      double weight_decay);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr when unsupported at build or run time

/// Active backend for the process. `select` accepts "auto", "scalar" or
/// "avx2" (the latter fails if unavailable).
const Backend& active();
void select(const std::string& name);

}  // namespace pg::kernels
