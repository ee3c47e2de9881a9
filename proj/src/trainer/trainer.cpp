#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "gtpool/adam.hpp"
#include "gtpool/errors.hpp"
#include "gtpool/ops.hpp"
#include "gtpool/rng.hpp"
#include "gtpool/trainer.hpp"

namespace gtpool {
namespace {

std::size_t argmax_row(const Matrix& logits) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < logits.cols; ++c) {
    if (logits(0, c) > logits(0, best)) best = c;
  }
  return best;
}

void touch(const AccessLog* log, Phase phase, std::size_t index) {
  if (log != nullptr && *log) (*log)(phase, index);
}

std::uint64_t plan_seed(const RunConfig& config, std::size_t repeat) {
  return Rng(config.seed).derive(0x9f01d + repeat).next_u64();
}

}  // namespace

EvalResult evaluate(const GtPoolNet& net, const Dataset& dataset, std::span<const std::size_t> indices,
                    Phase phase, const AccessLog* log) {
  EvalResult r;
  if (indices.empty()) return r;
  NoGradGuard guard;
  Rng unused(0);
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    touch(log, phase, i);
    const Graph& g = dataset.graphs.at(i);
    const Tensor logits = net.forward(g, false, unused).logits;
    const std::size_t label[] = {g.label};
    r.loss += ops::cross_entropy(logits, label).item();
    if (argmax_row(logits.value()) == g.label) ++correct;
  }
  r.loss /= static_cast<double>(indices.size());
  r.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
  return r;
}

FitResult fit(GtPoolNet& net, const RunConfig& config, const Dataset& dataset,
              std::span<const std::size_t> train, std::span<const std::size_t> val,
              std::uint64_t seed, const AccessLog* log) {
  if (train.empty()) throw ArgumentError("fit: empty training set");
  AdamConfig ac;
  ac.lr = config.lr;
  ac.weight_decay = config.wd;
  Adam opt(net.parameters(), ac);
  const Rng base(seed);
  Rng dropout_rng = base.derive(1);

  FitResult out;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_params = net.snapshot();
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    double total = 0.0;
    for (const auto& batch : batches(train, config.batch, base.derive(2).derive(epoch).next_u64())) {
      opt.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t i : batch) {
        touch(log, Phase::Train, i);
        const Graph& g = dataset.graphs.at(i);
        const std::size_t label[] = {g.label};
        Tensor loss = ops::cross_entropy(net.forward(g, true, dropout_rng).logits, label);
        batch_loss += loss.item();
        loss.backward();
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("training loss became non-finite in epoch " + std::to_string(epoch + 1));
      }
      opt.step();
      total += batch_loss;
    }
    const double train_loss = total / static_cast<double>(train.size());
    double monitored = train_loss;
    double val_acc = 0.0;
    if (!val.empty()) {
      const EvalResult ev = evaluate(net, dataset, val, Phase::Validate, log);
      monitored = ev.loss;
      val_acc = ev.accuracy;
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.train_loss.push_back(train_loss);
    out.val_loss.push_back(val.empty() ? train_loss : monitored);
    out.val_accuracy.push_back(val_acc);
    out.epoch_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

    if (monitored < best) {
      best = monitored;
      best_params = net.snapshot();
      out.best_epoch = epoch + 1;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  net.restore(best_params);
  return out;
}

FoldResult train_fold(const FoldContext& ctx) {
  FoldResult r;
  r.repeat = ctx.repeat;
  r.fold = ctx.fold;
  try {
    const Rng base = Rng(ctx.config.seed).derive(ctx.repeat).derive(ctx.fold);
    GtPoolNet net(ctx.config.model_config(ctx.dataset.feature_dim, ctx.dataset.num_classes),
                  base.derive(0).next_u64());
    FitResult f = fit(net, ctx.config, ctx.dataset, ctx.split.train, ctx.split.val, base.derive(1).next_u64(), ctx.log);
    r.train_loss = std::move(f.train_loss);
    r.val_loss = std::move(f.val_loss);
    r.val_accuracy = std::move(f.val_accuracy);
    r.epoch_ms = std::move(f.epoch_ms);
    r.best_epoch = f.best_epoch;
    r.epochs_run = r.train_loss.size();
    r.accuracy = evaluate(net, ctx.dataset, ctx.split.test, Phase::Test, ctx.log).accuracy;
    for (const auto& [name, t] : net.named_parameters()) r.weights.emplace_back(name, t.value());
  } catch (const Error& e) {
    r.error = e.what();
  } catch (const std::bad_alloc&) {
    r.error = "out of memory";
  }
  return r;
}

Dataset load_dataset(const RunConfig& config) {
  const std::filesystem::path dir = std::filesystem::path(config.data_root) / config.dataset;
  if (!std::filesystem::is_directory(dir)) throw Error("dataset directory not found: " + dir.string());
  return build_features(parse_tudataset(dir), parse_feature_scheme(config.features));
}

MetricsReport cross_validate(const RunConfig& config, const Dataset& dataset, const FoldRunner& runner,
                             const AccessLog* log) {
  config.validate();
  MetricsReport report;
  report.dataset = dataset.name;
  report.config = config.to_map();
  report.warnings = dataset.warnings;

  std::vector<FoldSplit> splits;
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t rep = 0; rep < config.repeats; ++rep) {
    const std::uint64_t seed = plan_seed(config, rep);
    const FoldPlan plan = stratified_folds(dataset, config.folds, seed);
    for (const auto& w : plan.warnings) report.warnings.push_back(w);
    for (std::size_t f = 0; f < config.folds; ++f) {
      splits.push_back(make_split(plan, dataset, f, config.val_fraction, seed));
      tasks.emplace_back(rep, f);
    }
  }

  const FoldRunner run = runner ? runner : FoldRunner(train_fold);
  std::vector<FoldResult> results(tasks.size());
  auto run_task = [&](std::size_t t) {
    const FoldContext ctx{config, dataset, splits[t], tasks[t].first, tasks[t].second, log};
    try {
      results[t] = run(ctx);
    } catch (const std::exception& e) {
      results[t].repeat = tasks[t].first;
      results[t].fold = tasks[t].second;
      results[t].error = e.what();
    }
  };

  const std::size_t workers = std::min(config.jobs, tasks.size());
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) run_task(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  report.folds = std::move(results);
  report.recompute();
  return report;
}

std::vector<SweepEntry> sweep(const RunConfig& config, const Dataset& dataset, const std::string& axis,
                              const std::vector<std::string>& values, const FoldRunner& runner) {
  std::vector<SweepEntry> out;
  for (const auto& v : values) {
    RunConfig c = config;
    c.set(axis, v);
    c.validate();
    out.push_back({v, cross_validate(c, dataset, runner)});
  }
  return out;
}

}  // namespace gtpool
