#include "gtpool/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gtpool/errors.hpp"
#include "gtpool/kernels.hpp"
#include "gtpool/rng.hpp"
#include "numcore/node.hpp"

namespace gtpool::ops {
namespace {

using detail::Node;

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " +
                       b.shape_str());
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.value().same_shape(b.value())) shape_error(op, a.value(), b.value());
}

// Parent i's gradient buffer, or nullptr if it does not take one.
Matrix* pgrad(Node& n, std::size_t i) {
  Node& p = *n.parents[i];
  return p.requires_grad ? &p.grad : nullptr;
}

const Matrix& pvalue(Node& n, std::size_t i) { return n.parents[i]->value; }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols != bv.rows) shape_error("matmul", av, bv);
  Matrix out(av.rows, bv.cols);
  kernels::active().gemm_nn(av.rows, av.cols, bv.cols, av.data.data(), bv.data.data(),
                            out.data.data());
  return make_op(std::move(out), {a, b}, [](Node& n) {
    const auto& k = kernels::active();
    const Matrix& A = pvalue(n, 0);
    const Matrix& B = pvalue(n, 1);
    const Matrix& G = n.grad;
    if (Matrix* ga = pgrad(n, 0)) {
      k.gemm_nt(A.rows, B.cols, A.cols, G.data.data(), B.data.data(), ga->data.data());
    }
    if (Matrix* gb = pgrad(n, 1)) {
      k.gemm_tn(A.cols, A.rows, B.cols, A.data.data(), G.data.data(), gb->data.data());
    }
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols != bv.cols) shape_error("matmul_nt", av, bv);
  Matrix out(av.rows, bv.rows);
  kernels::active().gemm_nt(av.rows, av.cols, bv.rows, av.data.data(), bv.data.data(),
                            out.data.data());
  return make_op(std::move(out), {a, b}, [](Node& n) {
    const auto& k = kernels::active();
    const Matrix& A = pvalue(n, 0);  // m x k
    const Matrix& B = pvalue(n, 1);  // p x k
    const Matrix& G = n.grad;        // m x p
    if (Matrix* ga = pgrad(n, 0)) {
      k.gemm_nn(A.rows, B.rows, A.cols, G.data.data(), B.data.data(), ga->data.data());
    }
    if (Matrix* gb = pgrad(n, 1)) {
      k.gemm_tn(B.rows, A.rows, A.cols, G.data.data(), A.data.data(), gb->data.data());
    }
  });
}

Tensor transpose(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.cols, av.rows);
  for (std::size_t i = 0; i < av.rows; ++i)
    for (std::size_t j = 0; j < av.cols; ++j) out(j, i) = av(i, j);
  return make_op(std::move(out), {a}, [](Node& n) {
    Matrix* ga = pgrad(n, 0);
    for (std::size_t i = 0; i < n.grad.rows; ++i)
      for (std::size_t j = 0; j < n.grad.cols; ++j) (*ga)(j, i) += n.grad(i, j);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  Matrix out(a.rows(), a.cols());
  kernels::active().add(out.size(), a.value().data.data(), b.value().data.data(), out.data.data());
  return make_op(std::move(out), {a, b}, [](Node& n) {
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < 2; ++i) {
      if (Matrix* g = pgrad(n, i)) k.axpy(g->size(), 1.0, n.grad.data.data(), g->data.data());
    }
  });
}

Tensor add_row(const Tensor& x, const Tensor& bias) {
  const Matrix& xv = x.value();
  const Matrix& bv = bias.value();
  if (bv.rows != 1 || bv.cols != xv.cols) shape_error("add_row", xv, bv);
  Matrix out(xv.rows, xv.cols);
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < xv.rows; ++r) {
    k.add(xv.cols, xv.row(r).data(), bv.data.data(), out.row(r).data());
  }
  return make_op(std::move(out), {x, bias}, [](Node& n) {
    const auto& k = kernels::active();
    if (Matrix* gx = pgrad(n, 0)) k.axpy(gx->size(), 1.0, n.grad.data.data(), gx->data.data());
    if (Matrix* gb = pgrad(n, 1)) {
      for (std::size_t r = 0; r < n.grad.rows; ++r) {
        k.axpy(gb->cols, 1.0, n.grad.row(r).data(), gb->data.data());
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  Matrix out = a.value();
  kernels::active().axpy(out.size(), -1.0, b.value().data.data(), out.data.data());
  return make_op(std::move(out), {a, b}, [](Node& n) {
    const auto& k = kernels::active();
    if (Matrix* g = pgrad(n, 0)) k.axpy(g->size(), 1.0, n.grad.data.data(), g->data.data());
    if (Matrix* g = pgrad(n, 1)) k.axpy(g->size(), -1.0, n.grad.data.data(), g->data.data());
  });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape("hadamard", a, b);
  Matrix out(a.rows(), a.cols());
  kernels::active().mul(out.size(), a.value().data.data(), b.value().data.data(), out.data.data());
  return make_op(std::move(out), {a, b}, [](Node& n) {
    const auto& k = kernels::active();
    if (Matrix* ga = pgrad(n, 0)) {
      k.mul_acc(ga->size(), n.grad.data.data(), pvalue(n, 1).data.data(), ga->data.data());
    }
    if (Matrix* gb = pgrad(n, 1)) {
      k.mul_acc(gb->size(), n.grad.data.data(), pvalue(n, 0).data.data(), gb->data.data());
    }
  });
}

Tensor scale(const Tensor& a, double alpha) {
  Matrix out(a.rows(), a.cols());
  kernels::active().scale(out.size(), alpha, a.value().data.data(), out.data.data());
  return make_op(std::move(out), {a}, [alpha](Node& n) {
    Matrix* g = pgrad(n, 0);
    kernels::active().axpy(g->size(), alpha, n.grad.data.data(), g->data.data());
  });
}

Tensor mul_rows(const Tensor& x, const Tensor& s) {
  const Matrix& xv = x.value();
  const Matrix& sv = s.value();
  if (sv.cols != 1 || sv.rows != xv.rows) shape_error("mul_rows", xv, sv);
  Matrix out(xv.rows, xv.cols);
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < xv.rows; ++r) k.scale(xv.cols, sv.data[r], xv.row(r).data(), out.row(r).data());
  return make_op(std::move(out), {x, s}, [](Node& n) {
    const auto& k = kernels::active();
    const Matrix& X = pvalue(n, 0);
    const Matrix& S = pvalue(n, 1);
    if (Matrix* gx = pgrad(n, 0)) {
      for (std::size_t r = 0; r < X.rows; ++r) k.axpy(X.cols, S.data[r], n.grad.row(r).data(), gx->row(r).data());
    }
    if (Matrix* gs = pgrad(n, 1)) {
      for (std::size_t r = 0; r < X.rows; ++r) gs->data[r] += k.dot(X.cols, n.grad.row(r).data(), X.row(r).data());
    }
  });
}

Tensor relu(const Tensor& a) {
  Matrix out(a.rows(), a.cols());
  kernels::active().relu(out.size(), a.value().data.data(), out.data.data());
  return make_op(std::move(out), {a}, [](Node& n) {
    Matrix* g = pgrad(n, 0);
    kernels::active().relu_backward(g->size(), pvalue(n, 0).data.data(), n.grad.data.data(),
                                    g->data.data());
  });
}

Tensor tanh(const Tensor& a) {
  Matrix out(a.rows(), a.cols());
  const Matrix& av = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::tanh(av.data[i]);
  return make_op(std::move(out), {a}, [](Node& n) {
    Matrix* g = pgrad(n, 0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double t = n.value.data[i];
      g->data[i] += n.grad.data[i] * (1.0 - t * t);
    }
  });
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

Tensor gelu(const Tensor& a) {
  Matrix out(a.rows(), a.cols());
  const Matrix& av = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = av.data[i];
    out.data[i] = 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
  }
  return make_op(std::move(out), {a}, [](Node& n) {
    Matrix* g = pgrad(n, 0);
    const Matrix& X = pvalue(n, 0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double x = X.data[i];
      const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
      const double du = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
      g->data[i] += n.grad.data[i] * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du);
    }
  });
}

Tensor mean_rows(const Tensor& a) {
  const Matrix& av = a.value();
  if (av.rows == 0) throw DimensionError("mean_rows: empty input " + av.shape_str());
  Matrix out(1, av.cols);
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < av.rows; ++r) k.axpy(av.cols, 1.0, av.row(r).data(), out.data.data());
  k.scale(out.size(), 1.0 / static_cast<double>(av.rows), out.data.data(), out.data.data());
  return make_op(std::move(out), {a}, [](Node& n) {
    Matrix* g = pgrad(n, 0);
    const double inv = 1.0 / static_cast<double>(g->rows);
    for (std::size_t r = 0; r < g->rows; ++r) {
      kernels::active().axpy(g->cols, inv, n.grad.data.data(), g->row(r).data());
    }
  });
}

Tensor max_rows(const Tensor& a) {
  const Matrix& av = a.value();
  if (av.rows == 0) throw DimensionError("max_rows: empty input " + av.shape_str());
  Matrix out(1, av.cols);
  std::vector<std::size_t> argmax(av.cols, 0);
  for (std::size_t c = 0; c < av.cols; ++c) {
    double best = av(0, c);
    for (std::size_t r = 1; r < av.rows; ++r) {
      if (av(r, c) > best) {
        best = av(r, c);
        argmax[c] = r;
      }
    }
    out(0, c) = best;
  }
  return make_op(std::move(out), {a}, [argmax = std::move(argmax)](Node& n) {
    Matrix* g = pgrad(n, 0);
    for (std::size_t c = 0; c < argmax.size(); ++c) (*g)(argmax[c], c) += n.grad(0, c);
  });
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double v : a.value().data) s += v;
  return make_op(Matrix(1, 1, s), {a}, [](Node& n) {
    Matrix* g = pgrad(n, 0);
    const double gv = n.grad.data[0];
    for (double& v : g->data) v += gv;
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    const Matrix& pv = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(pv.row(r).begin(), pv.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
    }
    offset += pv.cols;
  }
  return make_op(std::move(out), std::vector<Tensor>(parts.begin(), parts.end()), [](Node& n) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const std::size_t pc = n.parents[i]->value.cols;
      if (Matrix* g = pgrad(n, i)) {
        for (std::size_t r = 0; r < g->rows; ++r) {
          kernels::active().axpy(pc, 1.0, n.grad.row(r).data() + off, g->row(r).data());
        }
      }
      off += pc;
    }
  });
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> indices) {
  const Matrix& av = a.value();
  Matrix out(indices.size(), av.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= av.rows) {
      throw IndexError("gather_rows: index " + std::to_string(indices[i]) + " out of range for " +
                       av.shape_str());
    }
    std::copy(av.row(indices[i]).begin(), av.row(indices[i]).end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_op(std::move(out), {a}, [idx = std::move(idx)](Node& n) {
    Matrix* g = pgrad(n, 0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      kernels::active().axpy(g->cols, 1.0, n.grad.row(i).data(), g->row(idx[i]).data());
    }
  });
}

Tensor row_softmax(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows, av.cols);
  for (std::size_t r = 0; r < av.rows; ++r) {
    auto in = av.row(r);
    auto o = out.row(r);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - mx);
      sum += o[c];
    }
    const double inv = 1.0 / sum;
    for (double& v : o) v *= inv;
  }
  return make_op(std::move(out), {a}, [](Node& n) {
    Matrix* g = pgrad(n, 0);
    const auto& k = kernels::active();
    for (std::size_t r = 0; r < n.value.rows; ++r) {
      const double* y = n.value.row(r).data();
      const double* gy = n.grad.row(r).data();
      const double dotv = k.dot(n.value.cols, gy, y);
      double* gx = g->row(r).data();
      for (std::size_t c = 0; c < n.value.cols; ++c) gx[c] += y[c] * (gy[c] - dotv);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const Matrix& xv = x.value();
  const std::size_t d = xv.cols;
  if (gain.rows() != 1 || gain.cols() != d) shape_error("layer_norm", xv, gain.value());
  if (bias.rows() != 1 || bias.cols() != d) shape_error("layer_norm", xv, bias.value());
  Matrix xhat(xv.rows, d);
  std::vector<double> inv_std(xv.rows);
  Matrix out(xv.rows, d);
  for (std::size_t r = 0; r < xv.rows; ++r) {
    auto in = xv.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (in[c] - mean) * inv_std[r];
      out(r, c) = xhat(r, c) * gain.value().data[c] + bias.value().data[c];
    }
  }
  return make_op(std::move(out), {x, gain, bias},
                 [xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& n) {
                   const Matrix& G = n.grad;
                   const Matrix& gamma = pvalue(n, 1);
                   const std::size_t dd = G.cols;
                   if (Matrix* gx = pgrad(n, 0)) {
                     std::vector<double> dxhat(dd);
                     for (std::size_t r = 0; r < G.rows; ++r) {
                       double mean_d = 0.0;
                       double mean_dx = 0.0;
                       for (std::size_t c = 0; c < dd; ++c) {
                         dxhat[c] = G(r, c) * gamma.data[c];
                         mean_d += dxhat[c];
                         mean_dx += dxhat[c] * xhat(r, c);
                       }
                       mean_d /= static_cast<double>(dd);
                       mean_dx /= static_cast<double>(dd);
                       for (std::size_t c = 0; c < dd; ++c) {
                         (*gx)(r, c) += inv_std[r] * (dxhat[c] - mean_d - xhat(r, c) * mean_dx);
                       }
                     }
                   }
                   if (Matrix* gg = pgrad(n, 1)) {
                     for (std::size_t r = 0; r < G.rows; ++r)
                       for (std::size_t c = 0; c < dd; ++c) gg->data[c] += G(r, c) * xhat(r, c);
                   }
                   if (Matrix* gb = pgrad(n, 2)) {
                     for (std::size_t r = 0; r < G.rows; ++r)
                       for (std::size_t c = 0; c < dd; ++c) gb->data[c] += G(r, c);
                   }
                 });
}

Tensor dropout(const Tensor& a, double p, Rng& rng, bool train) {
  if (p < 0.0 || p >= 1.0) throw ArgumentError("dropout: p must be in [0, 1)");
  if (!train || p == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix mask(a.rows(), a.cols());
  for (double& m : mask.data) m = rng.uniform() >= p ? keep_scale : 0.0;
  Matrix out(a.rows(), a.cols());
  kernels::active().mul(out.size(), a.value().data.data(), mask.data.data(), out.data.data());
  return make_op(std::move(out), {a}, [mask = std::move(mask)](Node& n) {
    Matrix* g = pgrad(n, 0);
    kernels::active().mul_acc(g->size(), n.grad.data.data(), mask.data.data(), g->data.data());
  });
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels) {
  const Matrix& lv = logits.value();
  if (labels.size() != lv.rows) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                         lv.shape_str());
  }
  if (lv.rows == 0) throw DimensionError("cross_entropy: empty batch");
  Matrix probs(lv.rows, lv.cols);
  double loss = 0.0;
  for (std::size_t r = 0; r < lv.rows; ++r) {
    if (labels[r] >= lv.cols) {
      throw IndexError("cross_entropy: label " + std::to_string(labels[r]) + " out of range for " +
                       std::to_string(lv.cols) + " classes");
    }
    auto in = lv.row(r);
    const auto top = std::max_element(in.begin(), in.end());
    const double mx = *top;
    // log-sum-exp as log1p of the non-max terms keeps tiny losses accurate
    double rest = 0.0;
    for (std::size_t c = 0; c < lv.cols; ++c) {
      probs(r, c) = std::exp(in[c] - mx);
      if (in.begin() + static_cast<std::ptrdiff_t>(c) != top) rest += probs(r, c);
    }
    const double sum = 1.0 + rest;
    for (std::size_t c = 0; c < lv.cols; ++c) probs(r, c) /= sum;
    loss += -(in[labels[r]] - mx - std::log1p(rest));
  }
  loss /= static_cast<double>(lv.rows);
  std::vector<std::size_t> lab(labels.begin(), labels.end());
  return make_op(Matrix(1, 1, loss), {logits},
                 [probs = std::move(probs), lab = std::move(lab)](Node& n) {
                   Matrix* g = pgrad(n, 0);
                   const double scale = n.grad.data[0] / static_cast<double>(lab.size());
                   for (std::size_t r = 0; r < probs.rows; ++r) {
                     for (std::size_t c = 0; c < probs.cols; ++c) {
                       const double target = c == lab[r] ? 1.0 : 0.0;
                       (*g)(r, c) += scale * (probs(r, c) - target);
                     }
                   }
                 });
}

}  // namespace gtpool::ops
