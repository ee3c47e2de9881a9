#include <algorithm>
#include <limits>

#include "gtpool/errors.hpp"
#include "gtpool/graph.hpp"

namespace gtpool {

FeatureScheme parse_feature_scheme(const std::string& name) {
  if (name == "auto") return FeatureScheme::Auto;
  if (name == "node_labels_onehot" || name == "labels") return FeatureScheme::NodeLabelsOneHot;
  if (name == "degree_onehot" || name == "degree") return FeatureScheme::DegreeOneHot;
  if (name == "attributes") return FeatureScheme::Attributes;
  throw ConfigError("unknown feature scheme '" + name +
                    "' (valid: auto, node_labels_onehot, degree_onehot, attributes)");
}

Dataset build_features(Dataset dataset, FeatureScheme scheme, std::size_t degree_cap) {
  const bool has_labels = !dataset.graphs.empty() &&
                          std::all_of(dataset.graphs.begin(), dataset.graphs.end(), [](const Graph& g) {
                            return g.node_labels.size() == g.n;
                          });
  const bool has_attrs = !dataset.graphs.empty() &&
                         std::all_of(dataset.graphs.begin(), dataset.graphs.end(), [](const Graph& g) {
                           return g.node_attributes.rows == g.n && g.node_attributes.cols > 0;
                         });
  if (scheme == FeatureScheme::Auto) {
    scheme = has_labels ? FeatureScheme::NodeLabelsOneHot : FeatureScheme::DegreeOneHot;
  }

  switch (scheme) {
    case FeatureScheme::NodeLabelsOneHot: {
      if (!has_labels) throw ConfigError(dataset.name + ": node_labels_onehot requested but no node labels were loaded");
      long lo = std::numeric_limits<long>::max();
      long hi = std::numeric_limits<long>::min();
      for (const Graph& g : dataset.graphs) {
        for (long l : g.node_labels) {
          lo = std::min(lo, l);
          hi = std::max(hi, l);
        }
      }
      const std::size_t dim = lo > hi ? 1 : static_cast<std::size_t>(hi - lo + 1);
      for (Graph& g : dataset.graphs) {
        g.x = Matrix(g.n, dim);
        for (std::size_t i = 0; i < g.n; ++i) g.x(i, static_cast<std::size_t>(g.node_labels[i] - lo)) = 1.0;
      }
      dataset.feature_dim = dim;
      break;
    }
    case FeatureScheme::DegreeOneHot: {
      const std::size_t dim = degree_cap + 1;
      for (Graph& g : dataset.graphs) {
        g.x = Matrix(g.n, dim);
        const auto deg = g.degrees();
        for (std::size_t i = 0; i < g.n; ++i) g.x(i, std::min(deg[i], degree_cap)) = 1.0;
      }
      dataset.feature_dim = dim;
      break;
    }
    case FeatureScheme::Attributes: {
      if (!has_attrs) throw ConfigError(dataset.name + ": attributes requested but no node attributes were loaded");
      for (Graph& g : dataset.graphs) g.x = g.node_attributes;
      dataset.feature_dim = dataset.graphs.front().node_attributes.cols;
      break;
    }
    case FeatureScheme::Auto: break;
  }
  return dataset;
}

}  // namespace gtpool
