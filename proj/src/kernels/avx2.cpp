// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma and only
// reached through the dispatcher after a CPU feature check.

#include <immintrin.h>

#include "kernels/tables.hpp"

namespace gtpool::kernels {
namespace {

// y[0..n) += alpha * x[0..n)
inline void axpy_row(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256d y0 = _mm256_loadu_pd(y + j);
    __m256d y1 = _mm256_loadu_pd(y + j + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j + 4), y1);
    _mm256_storeu_pd(y + j, y0);
    _mm256_storeu_pd(y + j + 4, y1);
  }
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(y + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j)));
  }
  for (; j < n; ++j) y[j] += alpha * x[j];
}

// y += a0*x0 + a1*x1 + a2*x2 + a3*x3, one load/store of y per four rank-1 updates.
inline void axpy4_row(std::size_t n, const double* alpha, const double* x0, const double* x1,
                      const double* x2, const double* x3, double* y) {
  const __m256d a0 = _mm256_set1_pd(alpha[0]);
  const __m256d a1 = _mm256_set1_pd(alpha[1]);
  const __m256d a2 = _mm256_set1_pd(alpha[2]);
  const __m256d a3 = _mm256_set1_pd(alpha[3]);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_loadu_pd(y + j);
    acc = _mm256_fmadd_pd(a0, _mm256_loadu_pd(x0 + j), acc);
    acc = _mm256_fmadd_pd(a1, _mm256_loadu_pd(x1 + j), acc);
    acc = _mm256_fmadd_pd(a2, _mm256_loadu_pd(x2 + j), acc);
    acc = _mm256_fmadd_pd(a3, _mm256_loadu_pd(x3 + j), acc);
    _mm256_storeu_pd(y + j, acc);
  }
  for (; j < n; ++j) {
    y[j] += alpha[0] * x0[j] + alpha[1] * x1[j] + alpha[2] * x2[j] + alpha[3] * x3[j];
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(std::size_t n, const double* a, const double* b) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      axpy4_row(n, arow + p, b + p * n, b + (p + 1) * n, b + (p + 2) * n, b + (p + 3) * n, crow);
    }
    for (; p < k; ++p) axpy_row(n, arow[p], b + p * n, crow);
  }
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      const double alpha[4] = {a[p * m + i], a[(p + 1) * m + i], a[(p + 2) * m + i],
                               a[(p + 3) * m + i]};
      axpy4_row(n, alpha, b + p * n, b + (p + 1) * n, b + (p + 2) * n, b + (p + 3) * n, crow);
    }
    for (; p < k; ++p) axpy_row(n, a[p * m + i], b + p * n, crow);
  }
}

void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot(k, a + i * k, b + j * k);
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) { axpy_row(n, alpha, x, y); }

void add(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                              _mm256_loadu_pd(out + i)));
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void scale(std::size_t n, double alpha, const double* x, double* out) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

void relu(std::size_t n, const double* x, double* out) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  // max_pd returns the second operand for NaN and for +-0, matching the scalar select.
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::size_t n, const double* x, const double* g, double* gx) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    const __m256d gm = _mm256_and_pd(mask, _mm256_loadu_pd(g + i));
    _mm256_storeu_pd(gx + i, _mm256_add_pd(_mm256_loadu_pd(gx + i), gm));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) gx[i] += g[i];
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{Isa::Avx2, gemm_nn, gemm_tn, gemm_nt, dot,  axpy,
                                 add,       mul,     mul_acc, scale,   relu, relu_backward};
  return table;
}

}  // namespace gtpool::kernels
