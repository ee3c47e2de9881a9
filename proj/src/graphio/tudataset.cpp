#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>

#include "gtpool/errors.hpp"
#include "gtpool/graph.hpp"

namespace gtpool {
namespace {

namespace fs = std::filesystem;

struct Line {
  std::size_t number;  // 1-based
  std::vector<std::string> fields;
};

// Non-blank lines of `path`, split on commas and whitespace.
std::vector<Line> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    Line line{number, {}};
    std::string token;
    for (char ch : text) {
      if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
        if (!token.empty()) line.fields.push_back(std::move(token));
        token.clear();
      } else {
        token.push_back(ch);
      }
    }
    if (!token.empty()) line.fields.push_back(std::move(token));
    if (!line.fields.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

long parse_long(const std::string& s, const fs::path& file, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(file.filename().string() + ":" + std::to_string(line) + ": expected an integer, got '" + s + "'");
  }
  return value;
}

double parse_double(const std::string& s, const fs::path& file, std::size_t line) {
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw FormatError(file.filename().string() + ":" + std::to_string(line) + ": expected a number, got '" + s + "'");
  }
  return value;
}

fs::path required(const fs::path& dir, const std::string& name, const char* suffix) {
  fs::path p = dir / (name + suffix);
  if (!fs::exists(p)) throw FormatError("missing required file " + p.string());
  return p;
}

// Reference graph counts of the public benchmark collections, used only to warn.
const std::map<std::string, std::size_t>& reference_counts() {
  static const std::map<std::string, std::size_t> counts{
      {"MUTAG", 188},        {"ENZYMES", 600},      {"PROTEINS", 1173}, {"PTC_MR", 344},
      {"Synthie", 400},      {"IMDB-BINARY", 1000}, {"IMDB-MULTI", 1500}};
  return counts;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset parse_tudataset(const fs::path& dir_in) {
  const fs::path dir = dir_in.has_filename() ? dir_in : dir_in.parent_path();
  if (!fs::is_directory(dir)) throw FormatError("dataset directory not found: " + dir.string());
  const std::string name = dir.filename().string();

  const fs::path a_path = required(dir, name, "_A.txt");
  const fs::path ind_path = required(dir, name, "_graph_indicator.txt");
  const fs::path gl_path = required(dir, name, "_graph_labels.txt");

  Dataset ds;
  ds.name = name;

  // graph labels -> contiguous classes in ascending order of the raw value
  std::vector<long> raw_labels;
  for (const Line& l : read_lines(gl_path)) raw_labels.push_back(parse_long(l.fields[0], gl_path, l.number));
  const std::size_t num_graphs = raw_labels.size();
  ds.class_values = raw_labels;
  std::sort(ds.class_values.begin(), ds.class_values.end());
  ds.class_values.erase(std::unique(ds.class_values.begin(), ds.class_values.end()), ds.class_values.end());
  ds.num_classes = ds.class_values.size();

  ds.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.graphs[g].label = static_cast<std::size_t>(
        std::lower_bound(ds.class_values.begin(), ds.class_values.end(), raw_labels[g]) - ds.class_values.begin());
  }

  // node -> (graph, local id)
  std::vector<std::size_t> node_graph;
  std::vector<std::size_t> node_local;
  for (const Line& l : read_lines(ind_path)) {
    const long gid = parse_long(l.fields[0], ind_path, l.number);
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs) {
      throw ConsistencyError(ind_path.filename().string() + ":" + std::to_string(l.number) + ": graph id " +
                             std::to_string(gid) + " outside 1.." + std::to_string(num_graphs));
    }
    const std::size_t g = static_cast<std::size_t>(gid - 1);
    node_graph.push_back(g);
    node_local.push_back(ds.graphs[g].n++);
  }
  const std::size_t num_nodes = node_graph.size();

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(num_graphs);
  for (const Line& l : read_lines(a_path)) {
    if (l.fields.size() < 2) {
      throw FormatError(a_path.filename().string() + ":" + std::to_string(l.number) + ": expected 'u, v'");
    }
    const long u = parse_long(l.fields[0], a_path, l.number);
    const long v = parse_long(l.fields[1], a_path, l.number);
    for (long node : {u, v}) {
      if (node < 1 || static_cast<std::size_t>(node) > num_nodes) {
        throw ConsistencyError(a_path.filename().string() + ":" + std::to_string(l.number) + ": node " +
                               std::to_string(node) + " does not exist");
      }
    }
    const std::size_t gu = node_graph[static_cast<std::size_t>(u - 1)];
    const std::size_t gv = node_graph[static_cast<std::size_t>(v - 1)];
    if (gu != gv) {
      throw ConsistencyError(a_path.filename().string() + ":" + std::to_string(l.number) + ": edge (" +
                             std::to_string(u) + ", " + std::to_string(v) + ") joins graphs " +
                             std::to_string(gu + 1) + " and " + std::to_string(gv + 1));
    }
    pairs[gu].emplace_back(node_local[static_cast<std::size_t>(u - 1)], node_local[static_cast<std::size_t>(v - 1)]);
  }
  for (std::size_t g = 0; g < num_graphs; ++g) ds.graphs[g].edges = canonical_edges(ds.graphs[g].n, pairs[g]);

  const fs::path nl_path = dir / (name + "_node_labels.txt");
  if (fs::exists(nl_path)) {
    const auto lines = read_lines(nl_path);
    if (lines.size() != num_nodes) {
      throw ConsistencyError(nl_path.filename().string() + ": " + std::to_string(lines.size()) +
                             " labels for " + std::to_string(num_nodes) + " nodes");
    }
    for (std::size_t i = 0; i < num_nodes; ++i) {
      ds.graphs[node_graph[i]].node_labels.push_back(parse_long(lines[i].fields[0], nl_path, lines[i].number));
    }
  }

  const fs::path na_path = dir / (name + "_node_attributes.txt");
  if (fs::exists(na_path)) {
    const auto lines = read_lines(na_path);
    if (lines.size() != num_nodes) {
      throw ConsistencyError(na_path.filename().string() + ": " + std::to_string(lines.size()) +
                             " attribute rows for " + std::to_string(num_nodes) + " nodes");
    }
    const std::size_t width = lines.empty() ? 0 : lines[0].fields.size();
    for (Graph& g : ds.graphs) g.node_attributes = Matrix(g.n, width);
    for (std::size_t i = 0; i < num_nodes; ++i) {
      if (lines[i].fields.size() != width) {
        throw FormatError(na_path.filename().string() + ":" + std::to_string(lines[i].number) +
                          ": expected " + std::to_string(width) + " attributes");
      }
      Graph& g = ds.graphs[node_graph[i]];
      for (std::size_t c = 0; c < width; ++c) {
        g.node_attributes(node_local[i], c) = parse_double(lines[i].fields[c], na_path, lines[i].number);
      }
    }
  }

  if (auto it = reference_counts().find(name); it != reference_counts().end() && it->second != num_graphs) {
    ds.warnings.push_back(name + ": parsed " + std::to_string(num_graphs) +
                          " graphs; the commonly reported count is " + std::to_string(it->second));
  }
  if (ds.num_classes < 2) {
    ds.warnings.push_back(name + ": only " + std::to_string(ds.num_classes) + " graph class present");
  }
  return ds;
}

void write_tudataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string& name = dataset.name;
  auto open = [&](const char* suffix) {
    std::ofstream out(dir / (name + suffix));
    if (!out) throw FormatError("cannot write " + (dir / (name + suffix)).string());
    return out;
  };

  std::ofstream a = open("_A.txt");
  std::ofstream ind = open("_graph_indicator.txt");
  std::ofstream gl = open("_graph_labels.txt");
  const bool labels = std::any_of(dataset.graphs.begin(), dataset.graphs.end(),
                                  [](const Graph& g) { return !g.node_labels.empty(); });
  const bool attrs = std::any_of(dataset.graphs.begin(), dataset.graphs.end(),
                                 [](const Graph& g) { return !g.node_attributes.empty(); });
  std::ofstream nl;
  std::ofstream na;
  if (labels) nl = open("_node_labels.txt");
  if (attrs) na = open("_node_attributes.txt");

  std::size_t offset = 1;
  for (std::size_t gi = 0; gi < dataset.graphs.size(); ++gi) {
    const Graph& g = dataset.graphs[gi];
    gl << dataset.class_values.at(g.label) << '\n';
    for (std::size_t i = 0; i < g.n; ++i) {
      ind << gi + 1 << '\n';
      if (labels) nl << g.node_labels.at(i) << '\n';
      if (attrs) {
        for (std::size_t c = 0; c < g.node_attributes.cols; ++c) {
          na << (c ? ", " : "") << format_double(g.node_attributes(i, c));
        }
        na << '\n';
      }
    }
    for (const Edge& e : g.edges) {
      a << offset + e.u << ", " << offset + e.v << '\n';
      a << offset + e.v << ", " << offset + e.u << '\n';
    }
    offset += g.n;
  }
}

}  // namespace gtpool
