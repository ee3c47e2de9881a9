#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gtpool/graph.hpp"
#include "gtpool/model.hpp"
#include "gtpool/sampler.hpp"

namespace gtpool {

struct RunConfig {
  std::string dataset = "MUTAG";
  std::string data_root = "data";
  std::string features = "auto";
  sampler::Method sampler = sampler::Method::RWSV;
  double mu = 0.5;
  double lambda = 0.5;
  std::size_t layers = 3;
  std::size_t heads = 4;
  std::size_t hidden = 64;
  std::size_t batch = 64;
  double lr = 5e-4;
  double wd = 1e-4;
  double dropout = 0.3;
  std::size_t epochs = 200;
  std::size_t patience = 30;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::size_t jobs = 1;
  std::size_t folds = 10;
  double val_fraction = 0.1;
  bool score_gating = false;
  std::string out = "runs";

  /// Keys accepted by set(); identical to the long CLI flag names.
  static const std::vector<std::string>& keys();
  /// Throws ConfigError naming the valid keys, or on an unparsable value.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  /// Throws ConfigError on out-of-range values.
  void validate() const;

  ModelConfig model_config(std::size_t input_dim, std::size_t num_classes) const;
  std::map<std::string, std::string> to_map() const;
};

/// Flat `key = value` lines; blank lines and lines starting with '#' are ignored.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

enum class Phase { Train, Validate, Test };

/// Called with the dataset index of every graph a fold touches.
using AccessLog = std::function<void(Phase, std::size_t graph_index)>;

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  double accuracy = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;
  std::vector<double> epoch_ms;
  /// Parameters at the best validation epoch (not serialized into reports).
  std::vector<std::pair<std::string, Matrix>> weights;
  /// Non-empty when the fold was aborted (divergence or another runtime error).
  std::string error;
  bool ok() const { return error.empty(); }
};

struct FoldContext {
  const RunConfig& config;
  const Dataset& dataset;
  const FoldSplit& split;
  std::size_t repeat;
  std::size_t fold;
  const AccessLog* log;
};

using FoldRunner = std::function<FoldResult(const FoldContext&)>;

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean cross-entropy and accuracy in eval mode (no dropout, no tape).
EvalResult evaluate(const GtPoolNet& net, const Dataset& dataset, std::span<const std::size_t> indices,
                    Phase phase = Phase::Test, const AccessLog* log = nullptr);

struct FitResult {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;
  std::vector<double> epoch_ms;
  std::size_t best_epoch = 0;
};

/// Adam on `train`, one step per mini-batch of summed per-graph losses. Early
/// stopping watches validation loss (training loss when `val` is empty) and the
/// best epoch's parameters are restored into `net` before returning. Throws
/// NumericError if the loss or a gradient stops being finite.
FitResult fit(GtPoolNet& net, const RunConfig& config, const Dataset& dataset,
              std::span<const std::size_t> train, std::span<const std::size_t> val,
              std::uint64_t seed, const AccessLog* log = nullptr);

/// Trains one fold and reports test accuracy at the best validation epoch.
/// Errors are caught and recorded in FoldResult::error.
FoldResult train_fold(const FoldContext& ctx);

struct MetricsReport {
  std::string dataset;
  std::map<std::string, std::string> config;
  std::vector<FoldResult> folds;
  double mean = 0.0;
  /// Population standard deviation over successful folds.
  double std = 0.0;
  std::size_t failed = 0;
  std::vector<std::string> warnings;

  void recompute();
  /// `include_timing` adds per-epoch milliseconds under "timing".
  std::string to_json(bool include_timing = true) const;
  static MetricsReport from_json(const std::string& text);
  /// repeat,fold,epoch,train_loss,val_loss,val_accuracy,epoch_ms
  std::string curves_csv() const;
};

/// Loads `<data_root>/<dataset>` and builds features.
Dataset load_dataset(const RunConfig& config);

/// Every fold of every repeat; failed folds are recorded and the rest still run.
MetricsReport cross_validate(const RunConfig& config, const Dataset& dataset, const FoldRunner& runner = {},
                             const AccessLog* log = nullptr);

struct SweepEntry {
  std::string value;
  MetricsReport report;
};

/// One cross_validate per value with `axis` (a RunConfig key) set to it.
std::vector<SweepEntry> sweep(const RunConfig& config, const Dataset& dataset, const std::string& axis,
                              const std::vector<std::string>& values, const FoldRunner& runner = {});

/// axis,value,mean,std,failed
std::string sweep_table_csv(const std::string& axis, const std::vector<SweepEntry>& entries);

}  // namespace gtpool
