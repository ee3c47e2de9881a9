#include <array>
#include <cmath>

#include "../support/pipeline_check.hpp"
#include "doctest.h"
#include "gtpool/errors.hpp"
#include "gtpool/gtpool_layer.hpp"
#include "gtpool/ops.hpp"

using namespace gtpool;

namespace {

GtPoolConfig small_config(double mu = 0.5, sampler::Method m = sampler::Method::RWSV, double lambda = 0.5) {
  GtPoolConfig c;
  c.dim = 8;
  c.heads = 2;
  c.lambda = lambda;
  c.spec = {mu, m};
  return c;
}

double row_sum(const Matrix& m, std::size_t r) {
  double s = 0.0;
  for (double v : m.row(r)) s += v;
  return s;
}

Graph complete_graph(std::size_t n, std::size_t dim, Rng& rng) {
  Graph g = testing::random_graph(n, 1.0, dim, rng);
  return g;
}

}  // namespace

TEST_CASE("attention is row-stochastic") {
  Rng rng(1);
  GtPoolLayer layer(small_config(), rng);
  Graph one = testing::random_graph(1, 0.0, 8, rng);
  const Attention a1 = layer.attention(Tensor::constant(one.x));
  CHECK(a1.a[0].value() == Matrix::from_rows({{1.0}}));
  const Graph g = testing::random_graph(9, 0.3, 8, rng);
  const Attention a = layer.attention(Tensor::constant(g.x));
  for (const auto& h : a.a) {
    for (std::size_t r = 0; r < g.n; ++r) CHECK(std::abs(row_sum(h.value(), r) - 1.0) <= 1e-9);
  }
  for (auto& w : layer.wq) w.mutable_value().fill(0.0);
  const Attention u = layer.attention(Tensor::constant(g.x));
  for (double v : u.a[1].value().data) CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("score examples") {
  Rng rng(2);
  GtPoolLayer layer(small_config(), rng);
  Graph one = testing::random_graph(1, 0.0, 8, rng);
  const Attention a1 = layer.attention(Tensor::constant(one.x));
  CHECK(layer.score(a1, one.dense_adjacency(true)).value() == Matrix::from_rows({{1.0}}));

  // Complete graph: the mask is all ones, so lambda does not matter when the thetas agree.
  const Graph k = complete_graph(6, 8, rng);
  for (std::size_t h = 0; h < 2; ++h) layer.theta_l[h].mutable_value() = layer.theta_g[h].value();
  const Attention ak = layer.attention(Tensor::constant(k.x));
  layer.mutable_config().lambda = 0.0;
  const Matrix s0 = layer.score(ak, k.dense_adjacency(true)).value();
  layer.mutable_config().lambda = 1.0;
  const Matrix s1 = layer.score(ak, k.dense_adjacency(true)).value();
  for (std::size_t i = 0; i < 6; ++i) CHECK(s0.data[i] == doctest::Approx(s1.data[i]).epsilon(1e-14));
}

TEST_CASE("lambda endpoints ignore the other branch") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Graph g = testing::random_graph(8, 0.4, 8, rng);
    for (double lambda : {0.0, 1.0}) {
      GtPoolLayer layer(small_config(0.5, sampler::Method::RWSV, lambda), rng);
      Rng r1(0), r2(0);
      const PoolResult before = layer.pool(Tensor::constant(g.x), g, false, r1);
      auto& unused = lambda == 1.0 ? layer.theta_l : layer.theta_g;
      for (auto& th : unused) th.mutable_value().fill(0.0);
      const PoolResult after = layer.pool(Tensor::constant(g.x), g, false, r2);
      CHECK(before.score.value() == after.score.value());
      CHECK(before.idx == after.idx);
      CHECK(before.x_prime.value() == after.x_prime.value());
    }
  }
}

TEST_CASE("pool with mu = 1 keeps the graph") {
  Rng rng(4);
  GtPoolLayer layer(small_config(1.0), rng);
  const Graph g = testing::random_graph(7, 0.5, 8, rng);
  Rng r(0);
  const PoolResult p = layer.pool(Tensor::constant(g.x), g, false, r);
  CHECK(p.idx == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
  CHECK(p.graph.edges == g.edges);
  CHECK(p.x_prime.rows() == 7);
  CHECK(p.x_prime.cols() == 8);
}

TEST_CASE("single node pooling") {
  Rng rng(5);
  GtPoolLayer layer(small_config(), rng);
  const Graph g = testing::random_graph(1, 0.0, 8, rng);
  Rng r(0);
  const Tensor x = Tensor::constant(g.x);
  const PoolResult p = layer.pool(x, g, false, r);
  CHECK(p.idx == std::vector<std::size_t>{0});
  const Attention a = layer.attention(x);
  const Tensor parts[] = {a.v[0], a.v[1]};
  const Tensor x_hat = ops::add(ops::matmul(ops::concat_cols(parts), layer.w_o), x);
  Tensor f = ops::layer_norm(x_hat, layer.ln_gain, layer.ln_bias);
  f = ops::add_row(ops::matmul(ops::gelu(ops::add_row(ops::matmul(f, layer.ffn_w1), layer.ffn_b1)), layer.ffn_w2),
                   layer.ffn_b2);
  const Matrix expect = ops::add(f, x_hat).value();
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(p.x_prime.value().data[i] == doctest::Approx(expect.data[i]).epsilon(1e-13));
  }
}

TEST_CASE("path graph with the constructed wheel") {
  Rng rng(6);
  GtPoolLayer layer(small_config(), rng);
  Graph g = testing::path_graph(4, 8);
  const auto d = sampler::ScoreDistribution::from_probabilities({0.10, 0.25, 0.30, 0.35});
  const auto idx = sampler::select(d, layer.config().spec);
  CHECK(idx == std::vector<std::size_t>{1, 2});
  Rng r(0);
  const PoolResult p = layer.pool(Tensor::constant(g.x), g, false, r, idx);
  CHECK(p.graph.n == 2);
  CHECK(p.graph.edges == std::vector<Edge>{{0, 1}});
  CHECK(p.adjacency() == Matrix::from_rows({{0, 1}, {1, 0}}));
}

TEST_CASE("pool structural invariants on small graphs") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const Graph g = testing::random_graph(n, rng.uniform(0.1, 0.9), 8, rng);
    const double mu = std::array<double, 3>{0.25, 0.5, 0.75}[rng.below(3)];
    const auto method = static_cast<sampler::Method>(rng.below(3));
    GtPoolLayer layer(small_config(mu, method, rng.uniform()), rng);
    Rng r(t);
    const PoolResult p = layer.pool(Tensor::constant(g.x), g, true, r);
    const std::size_t m = sampler::sample_count(n, mu);
    REQUIRE(p.idx.size() == m);
    CHECK(p.x_prime.rows() == m);
    const Matrix full = g.dense_adjacency(false);
    const Matrix sub = p.adjacency();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        CHECK(sub(i, j) == sub(j, i));
        CHECK(sub(i, j) == full(p.idx[i], p.idx[j]));
      }
    }
    for (const auto& a : p.refined_attention) {
      CHECK(a.rows() == m);
      CHECK(a.cols() == n);
      for (std::size_t r2 = 0; r2 < m; ++r2) CHECK(std::abs(row_sum(a.value(), r2) - 1.0) <= 1e-9);
    }
    CHECK(std::abs(row_sum(p.score.value(), 0) - 1.0) <= 1e-9);
  }
}

TEST_CASE("pool gradients with frozen selection") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    CHECK(testing::pool_grad_check(seed).rel_error < 1e-4);
    CHECK(testing::pool_grad_check(seed, true).rel_error < 1e-4);
  }
}

TEST_CASE("scoring parameters only learn with gating") {
  Rng rng(8);
  const Graph g = testing::random_graph(6, 0.5, 8, rng);
  for (bool gating : {false, true}) {
    GtPoolConfig c = small_config();
    c.score_gating = gating;
    GtPoolLayer layer(c, rng);
    Rng r(0);
    ops::sum_all(layer.pool(Tensor::constant(g.x), g, false, r).x_prime).backward();
    double norm = 0.0;
    for (const auto& th : layer.theta_g) {
      for (double v : th.grad().data) norm += v * v;
    }
    if (gating) CHECK(norm > 0.0);
    else CHECK(norm == 0.0);
  }
}

TEST_CASE("bad configurations") {
  Rng rng(0);
  GtPoolConfig c = small_config();
  c.heads = 3;
  CHECK_THROWS_AS(GtPoolLayer(c, rng), ConfigError);
  c = small_config();
  c.lambda = 1.5;
  CHECK_THROWS_AS(GtPoolLayer(c, rng), ConfigError);
  GtPoolLayer layer(small_config(), rng);
  const Graph g = testing::random_graph(4, 0.5, 8, rng);
  Rng r(0);
  const std::size_t unsorted[] = {2, 1};
  CHECK_THROWS_AS(layer.pool(Tensor::constant(g.x), g, false, r, unsorted), ArgumentError);
  CHECK_THROWS_AS(layer.pool(Tensor::constant(Matrix(4, 5)), g, false, r), DimensionError);
}
