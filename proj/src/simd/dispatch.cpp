#include "nsv/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace nsv::simd {

bool avx2_compiled() {
#ifdef NSV_HAVE_AVX2_TU
    return true;
#else
    return false;
#endif
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend detect() {
    if (const char* env = std::getenv("NSV_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_compiled() && avx2_supported())
            return Backend::avx2;
        if (std::strcmp(env, "avx2") == 0) return Backend::scalar;  // requested but unavailable
    }
    return (avx2_compiled() && avx2_supported()) ? Backend::avx2 : Backend::scalar;
}

std::atomic<int> g_backend{-1};

} // namespace

Backend active_backend() {
    int b = g_backend.load(std::memory_order_relaxed);
    if (b < 0) {
        b = static_cast<int>(detect());
        g_backend.store(b, std::memory_order_relaxed);
    }
    return static_cast<Backend>(b);
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !(avx2_compiled() && avx2_supported())) b = Backend::scalar;
    g_backend.store(static_cast<int>(b), std::memory_order_relaxed);
}

const char* backend_name() {
    return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

} // namespace nsv::simd
