#include <algorithm>
#include <cmath>

#include "gtpool/errors.hpp"
#include "gtpool/graph.hpp"
#include "gtpool/rng.hpp"
#include "json.hpp"

namespace gtpool {

std::vector<std::size_t> FoldPlan::fold(std::size_t fold_id) const {
  if (fold_id >= k) throw IndexError("fold " + std::to_string(fold_id) + " of a " + std::to_string(k) + "-fold plan");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold_id) out.push_back(i);
  }
  return out;
}

std::string FoldPlan::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["seed"] = seed;
  j["assignments"] = assignments;
  j["warnings"] = warnings;
  return j.dump(2);
}

FoldPlan FoldPlan::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    FoldPlan plan;
    plan.k = j.at("k").get<std::size_t>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.assignments = j.at("assignments").get<std::vector<std::size_t>>();
    if (j.contains("warnings")) plan.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (std::size_t a : plan.assignments) {
      if (a >= plan.k) throw FormatError("fold plan assigns fold " + std::to_string(a) + " with k = " + std::to_string(plan.k));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid fold plan JSON: ") + e.what());
  }
}

FoldPlan stratified_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("stratified_folds: k must be >= 2");
  if (dataset.graphs.size() < k) {
    throw ArgumentError("stratified_folds: " + std::to_string(dataset.graphs.size()) + " graphs cannot fill " +
                        std::to_string(k) + " folds");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(dataset.graphs.size(), 0);

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) by_class.at(dataset.graphs[i].label).push_back(i);

  Rng rng(seed);
  std::size_t cursor = 0;
  std::vector<std::size_t> pooled;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    rng.shuffle(std::span<std::size_t>(members));
    if (members.size() < k) {
      if (!members.empty()) {
        plan.warnings.push_back("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                                " graphs (< " + std::to_string(k) + " folds); assigned unstratified");
      }
      pooled.insert(pooled.end(), members.begin(), members.end());
      continue;
    }
    for (std::size_t m : members) plan.assignments[m] = cursor++ % k;
  }
  rng.shuffle(std::span<std::size_t>(pooled));
  for (std::size_t m : pooled) plan.assignments[m] = cursor++ % k;
  return plan;
}

FoldSplit make_split(const FoldPlan& plan, const Dataset& dataset, std::size_t fold_id,
                     double val_fraction, std::uint64_t seed) {
  if (plan.assignments.size() != dataset.graphs.size()) {
    throw ArgumentError("make_split: fold plan covers " + std::to_string(plan.assignments.size()) +
                        " graphs, dataset has " + std::to_string(dataset.graphs.size()));
  }
  if (val_fraction < 0.0 || val_fraction >= 1.0) throw ArgumentError("make_split: val_fraction must be in [0, 1)");
  FoldSplit split;
  split.test = plan.fold(fold_id);

  std::vector<std::vector<std::size_t>> rest_by_class(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    if (plan.assignments[i] != fold_id) rest_by_class.at(dataset.graphs[i].label).push_back(i);
  }
  Rng rng = Rng(seed).derive(fold_id);
  for (auto& members : rest_by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    const auto n_val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(members.size()) + 0.5));
    split.val.insert(split.val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

std::vector<std::vector<std::size_t>> batches(std::span<const std::size_t> indices, std::size_t batch_size,
                                              std::uint64_t seed) {
  if (batch_size == 0) throw ArgumentError("batches: batch_size must be > 0");
  std::vector<std::size_t> order(indices.begin(), indices.end());
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace gtpool
