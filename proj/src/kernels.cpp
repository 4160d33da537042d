#include "ladder/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace ladder::kernels {

bool avx2_available() {
#if defined(LADDER_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#if !defined(LADDER_HAVE_AVX2)
const Ops& avx2_ops() { return scalar_ops(); }
#endif

namespace {

Backend choose_backend() {
    if (const char* env = std::getenv("LADDER_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::avx2;
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = Backend::scalar;
bool g_chosen = false;

}  // namespace

Backend active_backend() {
    if (!g_chosen) {
        g_backend = choose_backend();
        g_chosen = true;
    }
    return g_backend;
}

const Ops& active() {
    return active_backend() == Backend::avx2 ? avx2_ops() : scalar_ops();
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
    g_backend = b;
    g_chosen = true;
}

std::string_view backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void softmax_inplace(double* z, std::size_t n, double temperature) {
    const Ops& ops = active();
    const double m = ops.max(z, n);
    const double inv_t = 1.0 / temperature;
    for (std::size_t i = 0; i < n; ++i) z[i] = std::exp((z[i] - m) * inv_t);
    const double total = ops.sum(z, n);
    ops.scale(z, 1.0 / total, n);
}

double softmax_inplace_with_logprob(double* z, std::size_t n, std::size_t index,
                                    double temperature) {
    const Ops& ops = active();
    const double m = ops.max(z, n);
    const double inv_t = 1.0 / temperature;
    const double shifted = (z[index] - m) * inv_t;
    for (std::size_t i = 0; i < n; ++i) z[i] = std::exp((z[i] - m) * inv_t);
    const double total = ops.sum(z, n);
    ops.scale(z, 1.0 / total, n);
    return shifted - std::log(total);
}

}  // namespace ladder::kernels
