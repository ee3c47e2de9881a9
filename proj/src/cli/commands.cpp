#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gtpool/cli.hpp"
#include "gtpool/errors.hpp"
#include "gtpool/ops.hpp"
#include "gtpool/rng.hpp"

namespace gtpool::cli {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return {m, std::sqrt(sq / static_cast<double>(v.size()))};
}

std::string node_name(std::size_t i, std::size_t n) {
  if (n <= 26) return std::string(1, static_cast<char>('a' + i));
  return std::to_string(i);
}

std::string index_set(const std::vector<std::size_t>& idx, std::size_t n) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? ", " : "") + node_name(idx[i], n);
  return s + "}";
}

}  // namespace

std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& label) {
  std::filesystem::create_directories(root);
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  const std::string base = std::string(stamp) + "-" + label;
  for (std::size_t attempt = 0;; ++attempt) {
    const auto dir = root / (attempt == 0 ? base : base + "-" + std::to_string(attempt));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

TrainOutput cmd_train(const RunConfig& config, std::ostream& out) {
  config.validate();
  const Dataset dataset = load_dataset(config);
  for (const auto& w : dataset.warnings) out << "warning: " << w << '\n';
  TrainOutput result;
  result.report = cross_validate(config, dataset);
  result.run_dir = make_run_dir(config.out, config.dataset);
  write_file(result.run_dir / "report.json", result.report.to_json());
  write_file(result.run_dir / "curves.csv", result.report.curves_csv());
  std::string cfg;
  for (const auto& [k, v] : config.to_map()) cfg += k + " = " + v + "\n";
  write_file(result.run_dir / "config.txt", cfg);
  for (const auto& f : result.report.folds) {
    if (!f.ok()) {
      out << "fold " << f.fold << " (repeat " << f.repeat << ") failed: " << f.error << '\n';
      continue;
    }
    save_checkpoint(result.run_dir / ("fold" + std::to_string(f.repeat) + "_" + std::to_string(f.fold) + ".ckpt"),
                    f.weights);
  }
  out << std::fixed << std::setprecision(2) << config.dataset << " " << sampler::method_name(config.sampler)
      << ": accuracy " << 100.0 * result.report.mean << " +- " << 100.0 * result.report.std << " % over "
      << result.report.folds.size() - result.report.failed << " folds\n"
      << "run directory: " << result.run_dir.string() << '\n';
  out.unsetf(std::ios::floatfield);
  return result;
}

void check_profile_args(std::size_t iterations, bool with_backward) {
  if (!with_backward) throw ConfigError("profile needs the backward pass; gradient-free profiling is not supported");
  if (iterations < 100) throw ConfigError("profile needs at least 100 measured iterations");
}

ProfileResult cmd_profile(const RunConfig& config, const Dataset& dataset, std::size_t warmup,
                          std::size_t iterations, bool with_backward) {
  check_profile_args(iterations, with_backward);
  if (dataset.graphs.empty()) throw ArgumentError("profile: empty dataset");
  config.validate();
  GtPoolNet net(config.model_config(dataset.feature_dim, dataset.num_classes), config.seed);
  Rng rng = Rng(config.seed).derive(1);
  ProfileResult r;
  r.parameters = net.count_parameters();
  r.iterations = iterations;
  r.warmup = warmup;
  std::vector<double> fwd, bwd;
  std::size_t cursor = 0;
  for (std::size_t it = 0; it < warmup + iterations; ++it) {
    std::vector<Tensor> losses;
    auto t0 = Clock::now();
    for (std::size_t b = 0; b < config.batch; ++b) {
      const Graph& g = dataset.graphs[cursor++ % dataset.graphs.size()];
      const std::size_t label[] = {g.label};
      losses.push_back(ops::cross_entropy(net.forward(g, true, rng).logits, label));
    }
    const double f_ms = ms_since(t0);
    t0 = Clock::now();
    for (auto& l : losses) l.backward();
    const double b_ms = ms_since(t0);
    for (auto& p : net.parameters()) p.zero_grad();
    if (it >= warmup) {
      fwd.push_back(f_ms);
      bwd.push_back(b_ms);
    }
  }
  std::tie(r.forward_mean_ms, r.forward_std_ms) = mean_std(fwd);
  std::tie(r.backward_mean_ms, r.backward_std_ms) = mean_std(bwd);
  return r;
}

std::vector<ScaleCell> cmd_bench_scale(const RunConfig& config, const std::vector<std::size_t>& node_counts,
                                       const std::vector<double>& densities) {
  config.validate();
  std::vector<ScaleCell> cells;
  for (std::size_t n : node_counts) {
    if (n < 2) throw ArgumentError("bench-scale: node counts must be >= 2");
    for (double density : densities) {
      ScaleCell cell;
      cell.n = n;
      cell.density = density;
      try {
        const Graph g = erdos_renyi(n, density, Rng(config.seed).derive(n).next_u64());
        cell.edges = g.edges.size();
        GtPoolNet net(config.model_config(1, 2), config.seed);
        Rng rng = Rng(config.seed).derive(7);
        const auto t0 = Clock::now();
        const std::size_t label[] = {0};
        Tensor loss = ops::cross_entropy(net.forward(g, true, rng).logits, label);
        loss.backward();
        cell.ms = ms_since(t0);
      } catch (const std::bad_alloc&) {
        cell.ms.reset();
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string scale_table(const std::vector<ScaleCell>& cells, const std::vector<std::size_t>& node_counts,
                        const std::vector<double>& densities) {
  std::ostringstream os;
  os << "n";
  for (double d : densities) os << ",density=" << d;
  os << '\n' << std::fixed << std::setprecision(2);
  for (std::size_t n : node_counts) {
    os << n;
    for (double d : densities) {
      os << ',';
      for (const auto& c : cells) {
        if (c.n == n && c.density == d) {
          if (c.ms) os << *c.ms;
          else os << "OOM";
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

void cmd_sample_demo(const std::vector<double>& scores, double mu, std::ostream& out) {
  const auto dist = sampler::ScoreDistribution::from_positive_scores(scores);
  const std::size_t n = dist.size();
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "node  score     pmf       cdf       rws interval        rwsv interval\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto [rl, ru] = sampler::rws_interval(dist, i);
    const auto [vl, vu] = sampler::rwsv_interval(dist, i);
    os << std::left << std::setw(6) << node_name(i, n) << std::right << std::setw(8) << scores[i] << "  "
       << std::setw(8) << dist.pmf()[i] << "  " << std::setw(8) << dist.cdf()[i] << "  (" << rl << ", " << ru
       << "]    (" << vl << ", " << vu << "]\n";
  }
  os << "sample points:";
  for (double k : sampler::sample_points(n, mu)) os << ' ' << k;
  os << '\n';
  for (auto m : {sampler::Method::RWS, sampler::Method::RWSV, sampler::Method::TOPK}) {
    const auto idx = sampler::select(dist, {mu, m});
    std::string name = sampler::method_name(m);
    for (char& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    os << std::left << std::setw(5) << name << std::right << ' ' << index_set(idx, n) << '\n';
  }
  out << os.str();
}

}  // namespace gtpool::cli
