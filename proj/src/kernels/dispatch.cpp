#include "pushgrasp/kernels.hpp"

#include "pushgrasp/common.hpp"

namespace pg::kernels {

#ifdef PUSHGRASP_HAVE_AVX2
const Backend* avx2_backend_impl();
#endif

const Backend* avx2_backend() {
#ifdef PUSHGRASP_HAVE_AVX2
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? avx2_backend_impl() : nullptr;
#else
    return nullptr;
#endif
}

namespace {
const Backend* g_active = nullptr;
}

const Backend& active() {
    if (!g_active) g_active = avx2_backend() ? avx2_backend() : &scalar_backend();
    return *g_active;
}

void select(const std::string& name) {
    if (name == "auto") {
        g_active = avx2_backend() ? avx2_backend() : &scalar_backend();
    } else if (name == "scalar") {
        g_active = &scalar_backend();
    } else if (name == "avx2") {
        if (!avx2_backend()) fail(ErrorCode::UsageError, "avx2 kernels unavailable on this host");
        g_active = avx2_backend();
    } else {
        fail(ErrorCode::UsageError, "unknown kernel backend '" + name + "'");
    }
}

}  // namespace pg::kernels
