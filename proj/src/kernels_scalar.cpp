// Scalar reference kernels. These define the semantics the SIMD variants are
// equivalence-tested against.

#include "ladder/kernels.hpp"

namespace ladder::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_scalar(const double* a, const double* x, double* y, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) y[i] = dot_scalar(a + i * n, x, n);
}

void matvec_t_accum_scalar(const double* a, const double* x, double* y, std::size_t m,
                           std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) axpy_scalar(x[i], a + i * n, y, n);
}

void outer_accum_scalar(double* a, const double* u, const double* v, std::size_t m,
                        std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) axpy_scalar(u[i], v, a + i * n, n);
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double max_scalar(const double* x, std::size_t n) {
    double best = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{dot_scalar,           axpy_scalar,        scale_scalar,
                         matvec_scalar,        matvec_t_accum_scalar,
                         outer_accum_scalar,   sum_scalar,         max_scalar};
    return ops;
}

}  // namespace ladder::kernels
