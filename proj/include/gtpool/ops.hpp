#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gtpool/tensor.hpp"

namespace gtpool {
class Rng;
}

namespace gtpool::ops {

// All ops throw DimensionError on shape mismatch, naming both shapes.

Tensor matmul(const Tensor& a, const Tensor& b);
/// a * b^T without materializing the transpose.
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
/// x[n x d] + bias[1 x d] broadcast over rows.
Tensor add_row(const Tensor& x, const Tensor& bias);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double alpha);
/// x[n x d] with row i multiplied by s[i]; s is n x 1.
Tensor mul_rows(const Tensor& x, const Tensor& s);

Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
/// Tanh approximation 0.5x(1 + tanh(sqrt(2/pi)(x + 0.044715x^3))).
Tensor gelu(const Tensor& a);

/// Column-wise mean, 1 x d.
Tensor mean_rows(const Tensor& a);
/// Column-wise max, 1 x d. Backward routes to the first arg-max row.
Tensor max_rows(const Tensor& a);
Tensor sum_all(const Tensor& a);

Tensor concat_cols(std::span<const Tensor> parts);
/// Rows `indices` of `a`, in the given order. Throws IndexError if out of range.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> indices);

/// Row-wise softmax with max subtraction.
Tensor row_softmax(const Tensor& a);

inline constexpr double kLayerNormEps = 1e-5;
/// Row-wise normalization to zero mean / unit variance, then * gain + bias (both 1 x d).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = kLayerNormEps);

/// Inverted dropout: in train mode keeps each entry with probability 1-p and
/// scales it by 1/(1-p); identity in eval mode or when p == 0.
Tensor dropout(const Tensor& a, double p, Rng& rng, bool train);

/// Mean over rows of -log softmax(logits)[label]. Throws IndexError on a bad label.
Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels);

}  // namespace gtpool::ops
