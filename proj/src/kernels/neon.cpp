// NEON (AArch64, float64x2) variants. Advanced SIMD is mandatory on AArch64,
// so the dispatcher offers this table unconditionally there.

#include <arm_neon.h>

#include "kernels/tables.hpp"

namespace gtpool::kernels {
namespace {

inline void axpy_row(std::size_t n, double alpha, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(y + j, vfmaq_f64(vld1q_f64(y + j), va, vld1q_f64(x + j)));
  for (; j < n; ++j) y[j] += alpha * x[j];
}

double dot(std::size_t n, const double* a, const double* b) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
             double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) axpy_row(n, a[i * k + p], b + p * n, c + i * n);
  }
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
             double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t i = 0; i < m; ++i) axpy_row(n, a[p * m + i], b + p * n, c + i * n);
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
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void mul(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vfmaq_f64(vld1q_f64(out + i), vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void scale(std::size_t n, double alpha, const double* x, double* out) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

void relu(std::size_t n, const double* x, double* out) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    // bit-select keeps NaN -> 0, matching the scalar (x > 0 ? x : 0)
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(v, zero), v, zero));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::size_t n, const double* x, const double* g, double* gx) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t mask = vcgtq_f64(vld1q_f64(x + i), zero);
    const float64x2_t gm = vbslq_f64(mask, vld1q_f64(g + i), zero);
    vst1q_f64(gx + i, vaddq_f64(vld1q_f64(gx + i), gm));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) gx[i] += g[i];
  }
}

}  // namespace

const KernelTable& neon_kernel_table() {
  static const KernelTable table{Isa::Neon, gemm_nn, gemm_tn, gemm_nt, dot,  axpy,
                                 add,       mul,     mul_acc, scale,   relu, relu_backward};
  return table;
}

}  // namespace gtpool::kernels
