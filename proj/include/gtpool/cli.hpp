#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gtpool/sampler.hpp"
#include "gtpool/trainer.hpp"

namespace gtpool::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kRuntimeError = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Creates `<root>/<stamp>-<label>`, adding a numeric suffix rather than reusing a directory.
std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& label);

struct TrainOutput {
  std::filesystem::path run_dir;
  MetricsReport report;
};

/// cross_validate, then report.json, curves.csv, config.txt and one checkpoint per fold.
TrainOutput cmd_train(const RunConfig& config, std::ostream& out);

struct ProfileResult {
  double forward_mean_ms = 0.0;
  double forward_std_ms = 0.0;
  double backward_mean_ms = 0.0;
  double backward_std_ms = 0.0;
  std::size_t parameters = 0;
  std::size_t iterations = 0;
  std::size_t warmup = 0;
};

/// Throws ConfigError if `iterations` < 100 or backward is disabled.
void check_profile_args(std::size_t iterations, bool with_backward);

/// Times forward and backward of one mini-batch per iteration. Warm-up
/// iterations are run and discarded. Throws ConfigError if `iterations` < 100
/// or backward is disabled.
ProfileResult cmd_profile(const RunConfig& config, const Dataset& dataset, std::size_t warmup = 10,
                          std::size_t iterations = 100, bool with_backward = true);

struct ScaleCell {
  std::size_t n = 0;
  double density = 0.0;
  std::optional<double> ms;  // empty means OOM
  std::size_t edges = 0;
};

/// One forward + backward of the configured model on an Erdos-Renyi graph per (n, density).
std::vector<ScaleCell> cmd_bench_scale(const RunConfig& config, const std::vector<std::size_t>& node_counts,
                                       const std::vector<double>& densities);
std::string scale_table(const std::vector<ScaleCell>& cells, const std::vector<std::size_t>& node_counts,
                        const std::vector<double>& densities);

/// Prints pmf, CDF, sample points, per-method intervals and selections.
void cmd_sample_demo(const std::vector<double>& scores, double mu, std::ostream& out);

}  // namespace gtpool::cli
