// AVX2+FMA kernels. Compiled only on x86-64 with -mavx2 -mfma; this file must
// not be entered unless avx2_available() returned true. Reductions accumulate
// in four lanes and fold at the end, so sums can differ from the scalar
// reference by reassociation noise only.

#include "ladder/kernels.hpp"

#if defined(LADDER_HAVE_AVX2)

#include <immintrin.h>

namespace ladder::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double out = hsum(acc);
    for (; i < n; ++i) out += a[i] * b[i];
    return out;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double* x, double alpha, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    for (; i < n; ++i) x[i] *= alpha;
}

void matvec_avx2(const double* a, const double* x, double* y, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) y[i] = dot_avx2(a + i * n, x, n);
}

void matvec_t_accum_avx2(const double* a, const double* x, double* y, std::size_t m,
                         std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) axpy_avx2(x[i], a + i * n, y, n);
}

void outer_accum_avx2(double* a, const double* u, const double* v, std::size_t m,
                      std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) axpy_avx2(u[i], v, a + i * n, n);
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double out = hsum(acc);
    for (; i < n; ++i) out += x[i];
    return out;
}

double max_avx2(const double* x, std::size_t n) {
    if (n < 8) {
        double best = x[0];
        for (std::size_t i = 1; i < n; ++i)
            if (x[i] > best) best = x[i];
        return best;
    }
    __m256d acc = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double best = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] > best) best = lanes[k];
    for (; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{dot_avx2,         axpy_avx2,        scale_avx2,
                         matvec_avx2,      matvec_t_accum_avx2,
                         outer_accum_avx2, sum_avx2,         max_avx2};
    return ops;
}

}  // namespace ladder::kernels

#endif  // LADDER_HAVE_AVX2
