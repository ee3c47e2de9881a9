#pragma once

// Dense float64 inner-loop kernels.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA on
// x86-64, NEON on AArch64) are compiled in separate translation units and picked
// at runtime from what the CPU reports. The GTPOOL_SIMD environment variable
// (scalar | avx2 | neon | auto) overrides the choice on first use.

#include <cstddef>
#include <string_view>
#include <vector>

namespace gtpool::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

/// Function table for one instruction set. Matrices are row-major and
/// contiguous; all gemm variants accumulate into `c`.
struct KernelTable {
  Isa isa;
  // c[m x n] += a[m x k] * b[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  // c[m x n] += a[k x m]^T * b[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  // c[m x n] += a[m x k] * b[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  double (*dot)(std::size_t n, const double* a, const double* b);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  // out = a + b
  void (*add)(std::size_t n, const double* a, const double* b, double* out);
  // out = a * b
  void (*mul)(std::size_t n, const double* a, const double* b, double* out);
  // out += a * b
  void (*mul_acc)(std::size_t n, const double* a, const double* b, double* out);
  // out = alpha * x
  void (*scale)(std::size_t n, double alpha, const double* x, double* out);
  // out = max(x, 0)
  void (*relu)(std::size_t n, const double* x, double* out);
  // gx += (x > 0) ? g : 0
  void (*relu_backward)(std::size_t n, const double* x, const double* g, double* gx);
};

const KernelTable& scalar_table();

/// Table for `isa`, or nullptr when it is not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

/// Instruction sets usable on this machine, scalar first.
std::vector<Isa> available_isas();

/// The table every tensor op uses.
const KernelTable& active();

/// Switches the process-wide table. Throws ArgumentError if `isa` is unavailable.
void set_active(Isa isa);

}  // namespace gtpool::kernels
