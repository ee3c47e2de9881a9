#include "gtpool/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "gtpool/errors.hpp"

namespace gtpool::sampler {
namespace {

constexpr double kSumTolerance = 1e-9;

void require_nonempty(const ScoreDistribution& dist) {
  if (dist.size() == 0) throw ArgumentError("sampler: empty score distribution");
}

void require_point(double k) {
  if (!(k > 0.0 && k < 1.0)) throw ArgumentError("sampler: sample point must lie in (0, 1)");
}

// First index whose CDF equals cdf[i] (zero-mass nodes share a CDF value).
std::size_t first_with_same_cdf(const std::vector<double>& cdf, std::size_t i) {
  return static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), cdf[i]) - cdf.begin());
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::RWS: return "rws";
    case Method::RWSV: return "rwsv";
    case Method::TOPK: return "topk";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "rws") return Method::RWS;
  if (lower == "rwsv") return Method::RWSV;
  if (lower == "topk") return Method::TOPK;
  throw ConfigError("unknown sampler '" + name + "' (valid: topk, rws, rwsv)");
}

ScoreDistribution ScoreDistribution::from_probabilities(std::vector<double> probabilities) {
  if (probabilities.empty()) throw ArgumentError("ScoreDistribution: no scores");
  double total = 0.0;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < 0.0) throw ArgumentError("ScoreDistribution: scores must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ArgumentError("ScoreDistribution: scores sum to " + std::to_string(total) + ", expected 1");
  }
  ScoreDistribution d;
  d.s_ = std::move(probabilities);
  d.cdf_.resize(d.s_.size());
  std::partial_sum(d.s_.begin(), d.s_.end(), d.cdf_.begin());
  return d;
}

ScoreDistribution ScoreDistribution::from_positive_scores(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("ScoreDistribution: no scores");
  double total = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s <= 0.0) throw ArgumentError("ScoreDistribution: scores must be positive");
    total += s;
  }
  std::vector<double> p(scores.begin(), scores.end());
  for (double& v : p) v /= total;
  return from_probabilities(std::move(p));
}

std::size_t sample_count(std::size_t n, double mu) {
  if (n == 0) throw ArgumentError("sample_count: n must be >= 1");
  if (!(mu > 0.0 && mu <= 1.0)) throw ArgumentError("sample_count: mu must be in (0, 1]");
  // the small offset keeps products like 0.1 * 30 = 3.0000000000000004 from rounding up
  const double raw = std::ceil(mu * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

std::vector<double> sample_points(std::size_t n, double mu) {
  const std::size_t m = sample_count(n, mu);
  std::vector<double> points(m);
  for (std::size_t j = 0; j < m; ++j) points[j] = static_cast<double>(j + 1) / static_cast<double>(m + 1);
  return points;
}

std::size_t rws(const ScoreDistribution& dist, double k) {
  require_nonempty(dist);
  require_point(k);
  const auto& cdf = dist.cdf();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), k);
  // Past the end only when rounding left CDF[n-1] just under k.
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

std::size_t rwsv(const ScoreDistribution& dist, double k) {
  require_nonempty(dist);
  require_point(k);
  const auto& cdf = dist.cdf();
  const std::size_t j = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), k) - cdf.begin());
  if (j == 0) return 0;
  if (j == cdf.size()) return first_with_same_cdf(cdf, cdf.size() - 1);
  // cdf[j-1] < k <= cdf[j]; the midpoint splits the two candidates, ties go left.
  const double mid = (cdf[j - 1] + cdf[j]) / 2.0;
  return k <= mid ? first_with_same_cdf(cdf, j - 1) : j;
}

std::pair<double, double> rws_interval(const ScoreDistribution& dist, std::size_t i) {
  require_nonempty(dist);
  if (i >= dist.size()) throw IndexError("rws_interval: node out of range");
  const double upper = i + 1 == dist.size() ? 1.0 : dist.cdf()[i];
  return {dist.cdf_before(i), upper};
}

std::pair<double, double> rwsv_interval(const ScoreDistribution& dist, std::size_t i) {
  require_nonempty(dist);
  if (i >= dist.size()) throw IndexError("rwsv_interval: node out of range");
  const auto& cdf = dist.cdf();
  const double lower = i == 0 ? 0.0 : (cdf[i - 1] + cdf[i]) / 2.0;
  const double upper = i + 1 == cdf.size() ? 1.0 : (cdf[i] + cdf[i + 1]) / 2.0;
  return {lower, upper};
}

std::vector<std::size_t> select(const ScoreDistribution& dist, const SampleSpec& spec) {
  require_nonempty(dist);
  const std::size_t n = dist.size();
  const std::size_t m = sample_count(n, spec.mu);
  std::vector<std::size_t> chosen;
  chosen.reserve(m);

  if (spec.method == Method::TOPK) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& s = dist.pmf();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  } else {
    std::vector<bool> taken(n, false);
    for (double k : sample_points(n, spec.mu)) {
      std::size_t i = spec.method == Method::RWS ? rws(dist, k) : rwsv(dist, k);
      while (taken[i]) i = (i + n - 1) % n;
      taken[i] = true;
      chosen.push_back(i);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace gtpool::sampler
