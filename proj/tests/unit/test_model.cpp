#include <cmath>
#include <fstream>
#include <numeric>

#include "../support/pipeline_check.hpp"
#include "doctest.h"
#include "gtpool/errors.hpp"
#include "gtpool/model.hpp"

using namespace gtpool;

namespace {

ModelConfig config(std::size_t input_dim, sampler::Method m = sampler::Method::RWSV) {
  ModelConfig c;
  c.input_dim = input_dim;
  c.hidden = 16;
  c.heads = 4;
  c.layers = 3;
  c.num_classes = 2;
  c.spec = {0.5, m};
  return c;
}

Graph permuted(const Graph& g, const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(g.n);
  for (std::size_t i = 0; i < g.n; ++i) inv[perm[i]] = i;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Edge& e : g.edges) pairs.emplace_back(inv[e.u], inv[e.v]);
  Graph p;
  p.n = g.n;
  p.edges = canonical_edges(g.n, pairs);
  p.x = Matrix(g.n, g.x.cols);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t c = 0; c < g.x.cols; ++c) p.x(i, c) = g.x(perm[i], c);
  }
  return p;
}

}  // namespace

TEST_CASE("parameter counts") {
  ModelConfig c = config(7);
  c.hidden = 64;
  GtPoolNet net(c, 0);
  CHECK(net.embed_w.value().size() + net.embed_b.value().size() == 448 + 64);
  CHECK(net.count_parameters() == expected_parameter_count(c));

  // Hand count for d = 64, 4 heads (d_h = 16), 3 blocks, 7 inputs, 2 classes.
  const std::size_t embed = 7 * 64 + 64;
  const std::size_t per_block = 64 * 64                      // gcn
                                + 4 * (3 * 64 * 16 + 2 * 16)  // wq, wk, wv, theta_g, theta_l
                                + 64 * 64                     // w_o
                                + 64 * 128 + 128 + 128 * 64 + 64  // ffn
                                + 2 * 64;                     // layer norm
  const std::size_t head = 128 * 64 + 64 + 64 * 2 + 2;
  CHECK(net.count_parameters() == embed + 3 * per_block + head);
  CHECK(net.count_parameters() == 120834);

  ModelConfig bad = c;
  bad.layers = 0;
  CHECK_THROWS_AS(GtPoolNet(bad, 0), ConfigError);
}

TEST_CASE("graph sizes shrink by iterated ceilings") {
  Rng rng(1);
  GtPoolNet net(config(3), 1);
  for (std::size_t n : {1, 2, 5, 17, 30}) {
    const Graph g = testing::random_graph(n, 0.3, 3, rng);
    Rng r(0);
    const ForwardResult f = net.forward(g, false, r);
    std::size_t expect = n;
    for (std::size_t s : f.sizes) {
      expect = static_cast<std::size_t>(std::ceil(0.5 * static_cast<double>(expect)));
      CHECK(s == expect);
      CHECK(s >= 1);
    }
    CHECK(f.logits.rows() == 1);
    CHECK(f.logits.cols() == 2);
    CHECK(f.logits.value().all_finite());
  }
}

TEST_CASE("forward without dropout is deterministic") {
  Rng rng(2);
  ModelConfig c = config(3);
  c.dropout = 0.5;
  GtPoolNet net(c, 5);
  const Graph g = testing::random_graph(12, 0.3, 3, rng);
  Rng r1(1), r2(2);
  CHECK(net.forward(g, false, r1).logits.value() == net.forward(g, false, r2).logits.value());
  Rng r3(1), r4(1);
  CHECK(net.forward(g, true, r3).logits.value() == net.forward(g, true, r4).logits.value());
  CHECK(GtPoolNet(c, 5).snapshot() == net.snapshot());
}

TEST_CASE("degenerate single block keeps every node") {
  Rng rng(3);
  ModelConfig c = config(3);
  c.layers = 1;
  c.spec.mu = 1.0;
  GtPoolNet net(c, 3);
  const Graph g = testing::random_graph(6, 0.5, 3, rng);
  Rng r(0);
  const ForwardResult f = net.forward(g, false, r);
  CHECK(f.kept[0] == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("isomorphic graphs give the same logits under top-k") {
  Rng rng(4);
  GtPoolNet net(config(3, sampler::Method::TOPK), 4);
  for (int t = 0; t < 20; ++t) {
    const Graph g = testing::random_graph(10, 0.35, 3, rng);
    std::vector<std::size_t> perm(g.n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    Rng r1(0), r2(0);
    const Matrix a = net.forward(g, false, r1).logits.value();
    const Matrix b = net.forward(permuted(g, perm), false, r2).logits.value();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("end-to-end gradients with frozen selections") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    CHECK(testing::model_grad_check(seed).rel_error < 1e-4);
  }
}

TEST_CASE("checkpoints round trip") {
  const auto dir = testing::scratch_dir("ckpt");
  GtPoolNet a(config(3), 1);
  GtPoolNet b(config(3), 2);
  CHECK(a.snapshot() != b.snapshot());
  save_model(a, dir / "a.ckpt");
  load_model(b, dir / "a.ckpt");
  CHECK(a.snapshot() == b.snapshot());

  const auto entries = load_checkpoint(dir / "a.ckpt");
  CHECK(entries.size() == a.named_parameters().size());
  CHECK(entries.front().first == "embed.w");

  std::ifstream in(dir / "a.ckpt", std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  CHECK(std::string(magic, 7) == "GTPCKPT");

  GtPoolNet wide(config(4), 1);
  CHECK_THROWS_AS(load_model(wide, dir / "a.ckpt"), FormatError);
  std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  CHECK_THROWS_AS(load_checkpoint(dir / "junk.ckpt"), FormatError);
}
