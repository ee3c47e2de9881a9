#pragma once

// Parameter-free node selection from a significance-score vector.
//
// The scores are read as a probability mass over nodes and laid out on a
// wheel [0, 1] in node order. M = ceil(mu * n) fixed points k = j/(M+1) are
// dropped on the wheel and each picks a node:
//
//   RWS   node i owns (CDF[i-1], CDF[i]]            (CDF[-1] = 0)
//   RWSV  node i owns the points nearest to CDF[i], i.e. the interval between
//         the midpoints with its neighbours; exact midpoints go to the lower index
//   TOPK  the M largest scores, ties to the lower index (baseline)
//
// A point that lands on a node already taken walks left around the wheel
// (index - 1, wrapping) until it finds a free node. Points are processed in
// ascending order, so the result is a pure function of (scores, mu, method).
//
// Nothing here depends on how the scores were produced; any top-K style pooling
// layer can call select() in place of its own ranking step.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gtpool::sampler {

enum class Method { RWS, RWSV, TOPK };

std::string method_name(Method m);
/// Accepts rws | rwsv | topk (case-insensitive); throws ConfigError otherwise.
Method parse_method(const std::string& name);

/// Normalized scores and their running sum.
class ScoreDistribution {
public:
  /// `probabilities` must be non-negative and sum to 1 within 1e-9.
  static ScoreDistribution from_probabilities(std::vector<double> probabilities);
  /// Normalizes strictly positive raw scores; throws ArgumentError otherwise.
  static ScoreDistribution from_positive_scores(std::span<const double> scores);

  std::size_t size() const { return s_.size(); }
  const std::vector<double>& pmf() const { return s_; }
  const std::vector<double>& cdf() const { return cdf_; }
  /// CDF[i-1], with 0 for i == 0.
  double cdf_before(std::size_t i) const { return i == 0 ? 0.0 : cdf_[i - 1]; }

private:
  std::vector<double> s_;
  std::vector<double> cdf_;
};

struct SampleSpec {
  double mu = 0.5;
  Method method = Method::RWSV;
};

/// M = ceil(mu * n), clamped to [1, n]. Throws ArgumentError unless mu is in (0, 1] and n >= 1.
std::size_t sample_count(std::size_t n, double mu);

/// The M points j/(M+1), j = 1..M, ascending.
std::vector<double> sample_points(std::size_t n, double mu);

/// Node whose RWS interval (CDF[i-1], CDF[i]] contains k. O(log n).
std::size_t rws(const ScoreDistribution& dist, double k);

/// Node whose CDF value is nearest to k; exact ties go to the lower index. O(log n).
std::size_t rwsv(const ScoreDistribution& dist, double k);

/// Sampling interval of node i under each rule, as (lower, upper).
std::pair<double, double> rws_interval(const ScoreDistribution& dist, std::size_t i);
std::pair<double, double> rwsv_interval(const ScoreDistribution& dist, std::size_t i);

/// M distinct node indices, ascending.
std::vector<std::size_t> select(const ScoreDistribution& dist, const SampleSpec& spec);

}  // namespace gtpool::sampler
