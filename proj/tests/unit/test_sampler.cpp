#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <numeric>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "gtpool/errors.hpp"
#include "gtpool/rng.hpp"
#include "gtpool/sampler.hpp"

using namespace gtpool;
using namespace gtpool::sampler;

namespace {

const std::vector<double> kFig2 = {0.10, 0.25, 0.30, 0.35};

std::vector<double> random_scores(std::size_t n, Rng& rng) {
  std::vector<double> s(n);
  double total = 0.0;
  for (double& v : s) total += v = rng.uniform(0.01, 1.0);
  for (double& v : s) v /= total;
  return s;
}

}  // namespace

TEST_CASE("sample points") {
  CHECK(sample_points(4, 0.5) == std::vector<double>{1.0 / 3.0, 2.0 / 3.0});
  CHECK(sample_points(1, 0.5) == std::vector<double>{0.5});
  CHECK(sample_points(10, 0.25) == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(sample_count(30, 0.1) == 3);
  CHECK(sample_count(7, 1.0) == 7);
  CHECK(sample_count(3, 0.01) == 1);
  CHECK_THROWS_AS(sample_count(0, 0.5), ArgumentError);
  CHECK_THROWS_AS(sample_count(4, 0.0), ArgumentError);
  CHECK_THROWS_AS(sample_count(4, 1.5), ArgumentError);
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(ScoreDistribution::from_probabilities({0.5, 0.6}), ArgumentError);
  CHECK_THROWS_AS(ScoreDistribution::from_probabilities({1.5, -0.5}), ArgumentError);
  CHECK_THROWS_AS(ScoreDistribution::from_probabilities({}), ArgumentError);
  const double bad[] = {1.0, 0.0};
  CHECK_THROWS_AS(ScoreDistribution::from_positive_scores(bad), ArgumentError);
  const auto d = ScoreDistribution::from_positive_scores(kFig2);
  CHECK(d.cdf().back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.cdf_before(0) == 0.0);
  CHECK(d.cdf_before(2) == doctest::Approx(0.35));
}

TEST_CASE("rws and rwsv on the constructed wheel") {
  const auto d = ScoreDistribution::from_probabilities(kFig2);
  CHECK(rws(d, 1.0 / 3.0) == 1);
  CHECK(rws(d, 2.0 / 3.0) == 3);
  CHECK(rwsv(d, 1.0 / 3.0) == 1);
  CHECK(rwsv(d, 2.0 / 3.0) == 2);
  CHECK(testing::nearest_cdf(d.cdf(), 2.0 / 3.0) == 2);

  const auto u = ScoreDistribution::from_probabilities({0.25, 0.25, 0.25, 0.25});
  CHECK(rws(u, 0.5) == 1);
  const double mid = (u.cdf()[1] + u.cdf()[2]) / 2.0;
  CHECK(rwsv(u, mid) == 1);
  CHECK(rwsv(u, std::nextafter(mid, 1.0)) == 2);

  const auto one = ScoreDistribution::from_probabilities({1.0});
  for (double k : {0.01, 0.5, 0.99}) {
    CHECK(rws(one, k) == 0);
    CHECK(rwsv(one, k) == 0);
  }
  const ScoreDistribution empty;
  CHECK_THROWS_AS(rws(empty, 0.5), ArgumentError);
  CHECK_THROWS_AS(rwsv(empty, 0.5), ArgumentError);
  CHECK_THROWS_AS(rws(d, 0.0), ArgumentError);
}

TEST_CASE("select examples") {
  const auto d = ScoreDistribution::from_probabilities(kFig2);
  CHECK(select(d, {0.5, Method::RWS}) == std::vector<std::size_t>{1, 3});
  CHECK(select(d, {0.5, Method::RWSV}) == std::vector<std::size_t>{1, 2});
  CHECK(select(d, {0.5, Method::TOPK}) == std::vector<std::size_t>{2, 3});

  const auto dom = ScoreDistribution::from_probabilities({0.97, 0.01, 0.01, 0.01});
  CHECK(select(dom, {0.5, Method::RWS}) == std::vector<std::size_t>{0, 3});

  for (auto m : {Method::RWS, Method::RWSV, Method::TOPK}) {
    CHECK(select(d, {1.0, m}) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(testing::brute_force_select(kFig2, 0.5, m) == select(d, {0.5, m}));
  }
}

TEST_CASE("topk ties go to the lower index") {
  const auto d = ScoreDistribution::from_probabilities({0.2, 0.3, 0.2, 0.3});
  CHECK(select(d, {0.5, Method::TOPK}) == std::vector<std::size_t>{1, 3});
  CHECK(select(d, {0.75, Method::TOPK}) == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("select matches the brute-force oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const double mu = std::array<double, 4>{0.25, 0.5, 0.75, 1.0}[rng.below(4)];
    const auto s = random_scores(n, rng);
    const auto d = ScoreDistribution::from_probabilities(s);
    for (auto m : {Method::RWS, Method::RWSV, Method::TOPK}) {
      const auto got = select(d, {mu, m});
      REQUIRE(got == testing::brute_force_select(s, mu, m));
      REQUIRE(got.size() == sample_count(n, mu));
      REQUIRE(std::adjacent_find(got.begin(), got.end(), std::greater_equal<>()) == got.end());
      REQUIRE(got.back() < n);
    }
  }
}

TEST_CASE("rwsv is the nearest-cdf rule and rws the interval rule") {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto d = ScoreDistribution::from_probabilities(random_scores(1 + rng.below(12), rng));
    const double k = rng.uniform(1e-9, 1.0 - 1e-9);
    CHECK(rwsv(d, k) == testing::nearest_cdf(d.cdf(), k));
    const std::size_t i = rws(d, k);
    const auto [lo, hi] = rws_interval(d, i);
    CHECK(k > lo);
    CHECK(k <= hi);
    const auto [vlo, vhi] = rwsv_interval(d, rwsv(d, k));
    CHECK(k > vlo);
    CHECK(k <= vhi);
  }
}

TEST_CASE("interval structure") {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    const auto d = ScoreDistribution::from_probabilities(random_scores(n, rng));
    double prev_rws = 0.0, prev_rwsv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = rws_interval(d, i);
      const auto v = rwsv_interval(d, i);
      CHECK(r.first == prev_rws);
      CHECK(v.first == prev_rwsv);
      prev_rws = r.second;
      prev_rwsv = v.second;
    }
    CHECK(prev_rws == 1.0);
    CHECK(prev_rwsv == 1.0);
    // The last node's RWSV interval covers its RWS interval above the midpoint.
    const auto last_rws = rws_interval(d, n - 1);
    const auto last_rwsv = rwsv_interval(d, n - 1);
    const double mid = (d.cdf()[n - 2] + d.cdf()[n - 1]) / 2.0;
    CHECK(last_rwsv.first <= std::max(last_rws.first, mid));
    CHECK(last_rwsv.second >= last_rws.second);
    // The first node's RWSV interval reaches past its own CDF value.
    CHECK(rwsv_interval(d, 0).second >= d.cdf()[0]);
  }
}

TEST_CASE("permutation behaviour") {
  Rng rng(10);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const auto s = random_scores(n, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<double> ps(n);
    for (std::size_t i = 0; i < n; ++i) ps[i] = s[perm[i]];
    const auto d = ScoreDistribution::from_probabilities(s);
    const auto pd = ScoreDistribution::from_probabilities(ps);
    auto back = select(pd, {0.5, Method::TOPK});
    for (auto& i : back) i = perm[i];
    std::sort(back.begin(), back.end());
    CHECK(back == select(d, {0.5, Method::TOPK}));
    for (auto m : {Method::RWS, Method::RWSV}) {
      const auto got = select(pd, {0.5, m});
      CHECK(got.size() == sample_count(n, 0.5));
      CHECK(std::set<std::size_t>(got.begin(), got.end()).size() == got.size());
    }
  }
}

TEST_CASE("select is a pure function") {
  const auto d = ScoreDistribution::from_probabilities({0.05, 0.4, 0.05, 0.3, 0.2});
  for (auto m : {Method::RWS, Method::RWSV, Method::TOPK}) CHECK(select(d, {0.6, m}) == select(d, {0.6, m}));
}

TEST_CASE("method names") {
  CHECK(parse_method("RWSV") == Method::RWSV);
  CHECK(parse_method("topk") == Method::TOPK);
  CHECK(method_name(Method::RWS) == "rws");
  CHECK_THROWS_AS(parse_method("gumbel"), ConfigError);
}
