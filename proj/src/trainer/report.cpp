#include <cmath>
#include <sstream>

#include "gtpool/errors.hpp"
#include "gtpool/trainer.hpp"
#include "json.hpp"

namespace gtpool {

void MetricsReport::recompute() {
  std::size_t ok = 0;
  double sum = 0.0;
  for (const auto& f : folds) {
    if (!f.ok()) continue;
    ++ok;
    sum += f.accuracy;
  }
  failed = folds.size() - ok;
  mean = ok == 0 ? 0.0 : sum / static_cast<double>(ok);
  double sq = 0.0;
  for (const auto& f : folds) {
    if (f.ok()) sq += (f.accuracy - mean) * (f.accuracy - mean);
  }
  std = ok == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(ok));
}

std::string MetricsReport::to_json(bool include_timing) const {
  nlohmann::json j;
  j["dataset"] = dataset;
  j["config"] = config;
  j["mean"] = mean;
  j["std"] = std;
  j["failed"] = failed;
  j["warnings"] = warnings;
  nlohmann::json fj = nlohmann::json::array();
  nlohmann::json timing = nlohmann::json::array();
  for (const auto& f : folds) {
    nlohmann::json e;
    e["repeat"] = f.repeat;
    e["fold"] = f.fold;
    e["accuracy"] = f.accuracy;
    e["best_epoch"] = f.best_epoch;
    e["epochs_run"] = f.epochs_run;
    e["train_loss"] = f.train_loss;
    e["val_loss"] = f.val_loss;
    e["val_accuracy"] = f.val_accuracy;
    e["error"] = f.error;
    fj.push_back(std::move(e));
    timing.push_back({{"repeat", f.repeat}, {"fold", f.fold}, {"epoch_ms", f.epoch_ms}});
  }
  j["folds"] = std::move(fj);
  if (include_timing) j["timing"] = std::move(timing);
  return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.mean = j.at("mean").get<double>();
    r.std = j.at("std").get<double>();
    r.failed = j.at("failed").get<std::size_t>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
    for (const auto& e : j.at("folds")) {
      FoldResult f;
      f.repeat = e.at("repeat").get<std::size_t>();
      f.fold = e.at("fold").get<std::size_t>();
      f.accuracy = e.at("accuracy").get<double>();
      f.best_epoch = e.at("best_epoch").get<std::size_t>();
      f.epochs_run = e.at("epochs_run").get<std::size_t>();
      f.train_loss = e.at("train_loss").get<std::vector<double>>();
      f.val_loss = e.at("val_loss").get<std::vector<double>>();
      f.val_accuracy = e.at("val_accuracy").get<std::vector<double>>();
      f.error = e.at("error").get<std::string>();
      r.folds.push_back(std::move(f));
    }
    if (j.contains("timing")) {
      const auto& t = j.at("timing");
      for (std::size_t i = 0; i < t.size() && i < r.folds.size(); ++i) {
        r.folds[i].epoch_ms = t[i].at("epoch_ms").get<std::vector<double>>();
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid report JSON: ") + e.what());
  }
}

std::string MetricsReport::curves_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "repeat,fold,epoch,train_loss,val_loss,val_accuracy,epoch_ms\n";
  for (const auto& f : folds) {
    for (std::size_t e = 0; e < f.train_loss.size(); ++e) {
      os << f.repeat << ',' << f.fold << ',' << e + 1 << ',' << f.train_loss[e] << ','
         << (e < f.val_loss.size() ? f.val_loss[e] : NAN) << ','
         << (e < f.val_accuracy.size() ? f.val_accuracy[e] : NAN) << ','
         << (e < f.epoch_ms.size() ? f.epoch_ms[e] : NAN) << '\n';
    }
  }
  return os.str();
}

std::string sweep_table_csv(const std::string& axis, const std::vector<SweepEntry>& entries) {
  std::ostringstream os;
  os.precision(17);
  os << "axis,value,mean,std,failed\n";
  for (const auto& e : entries) {
    os << axis << ',' << e.value << ',' << e.report.mean << ',' << e.report.std << ',' << e.report.failed << '\n';
  }
  return os.str();
}

}  // namespace gtpool
