#pragma once
// Double-precision kernels behind the policy's inner loops.
//
// Every kernel has a scalar reference implementation; an AVX2+FMA variant is
// compiled on x86-64 and selected at runtime when the CPU supports it.
// Selection happens once per process, so a fixed build on a fixed machine
// always runs the same code path. Override with LADDER_KERNELS=scalar|avx2.

#include <cstddef>
#include <string_view>

namespace ladder::kernels {

struct Ops {
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scale)(double* x, double alpha, std::size_t n);
    // y = A x  (A row-major, m rows, n cols)
    void (*matvec)(const double* a, const double* x, double* y, std::size_t m, std::size_t n);
    // y += A^T x  (x has m entries, y has n)
    void (*matvec_t_accum)(const double* a, const double* x, double* y, std::size_t m,
                           std::size_t n);
    // A += u v^T  (u has m entries, v has n)
    void (*outer_accum)(double* a, const double* u, const double* v, std::size_t m,
                        std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*max)(const double* x, std::size_t n);
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();
bool avx2_available();
const Ops& avx2_ops();  // only meaningful when avx2_available()

Backend active_backend();
const Ops& active();
void force_backend(Backend b);  // test hook; also resets the cached choice

std::string_view backend_name(Backend b);

// Tempered softmax of z, in place, numerically stable. exp stays scalar in
// both backends so results match the reference to reduction-order noise only.
void softmax_inplace(double* z, std::size_t n, double temperature = 1.0);

// Same, but also returns log p[index] computed in shifted space (no ln(0)
// even when the probability underflows).
double softmax_inplace_with_logprob(double* z, std::size_t n, std::size_t index,
                                    double temperature = 1.0);

}  // namespace ladder::kernels
