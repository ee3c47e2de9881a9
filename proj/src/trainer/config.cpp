#include <charconv>
#include <fstream>
#include <sstream>

#include "gtpool/errors.hpp"
#include "gtpool/trainer.hpp"

namespace gtpool {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "dataset", "data-root", "features", "sampler", "mu",    "lambda",       "layers",
      "heads",   "hidden",    "batch",    "lr",      "wd",    "dropout",      "epochs",
      "patience", "seed",     "repeats",  "jobs",    "folds", "val-fraction", "score-gating",
      "out"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "dataset") dataset = v;
  else if (key == "data-root") data_root = v;
  else if (key == "features") features = v;
  else if (key == "sampler") sampler = sampler::parse_method(v);
  else if (key == "mu") mu = to_double(key, v);
  else if (key == "lambda") lambda = to_double(key, v);
  else if (key == "layers") layers = to_u64(key, v);
  else if (key == "heads") heads = to_u64(key, v);
  else if (key == "hidden") hidden = to_u64(key, v);
  else if (key == "batch") batch = to_u64(key, v);
  else if (key == "lr") lr = to_double(key, v);
  else if (key == "wd") wd = to_double(key, v);
  else if (key == "dropout") dropout = to_double(key, v);
  else if (key == "epochs") epochs = to_u64(key, v);
  else if (key == "patience") patience = to_u64(key, v);
  else if (key == "seed") seed = to_u64(key, v);
  else if (key == "repeats") repeats = to_u64(key, v);
  else if (key == "jobs") jobs = to_u64(key, v);
  else if (key == "folds") folds = to_u64(key, v);
  else if (key == "val-fraction") val_fraction = to_double(key, v);
  else if (key == "score-gating") score_gating = to_bool(key, v);
  else if (key == "out") out = v;
  else throw ConfigError("unknown config key '" + key + "'; valid keys: " + join(keys()));
}

std::string RunConfig::get(const std::string& key) const {
  const auto m = to_map();
  const auto it = m.find(key);
  if (it == m.end()) throw ConfigError("unknown config key '" + key + "'; valid keys: " + join(keys()));
  return it->second;
}

std::map<std::string, std::string> RunConfig::to_map() const {
  return {{"dataset", dataset},
          {"data-root", data_root},
          {"features", features},
          {"sampler", sampler::method_name(sampler)},
          {"mu", fmt(mu)},
          {"lambda", fmt(lambda)},
          {"layers", std::to_string(layers)},
          {"heads", std::to_string(heads)},
          {"hidden", std::to_string(hidden)},
          {"batch", std::to_string(batch)},
          {"lr", fmt(lr)},
          {"wd", fmt(wd)},
          {"dropout", fmt(dropout)},
          {"epochs", std::to_string(epochs)},
          {"patience", std::to_string(patience)},
          {"seed", std::to_string(seed)},
          {"repeats", std::to_string(repeats)},
          {"jobs", std::to_string(jobs)},
          {"folds", std::to_string(folds)},
          {"val-fraction", fmt(val_fraction)},
          {"score-gating", score_gating ? "true" : "false"},
          {"out", out}};
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (dataset.empty()) fail("dataset must be set");
  if (!(mu > 0.0 && mu <= 1.0)) fail("mu must be in (0, 1], got " + fmt(mu));
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must be in [0, 1], got " + fmt(lambda));
  if (layers < 1 || layers > 4) fail("layers must be in 1..4, got " + std::to_string(layers));
  if (heads < 1) fail("heads must be >= 1");
  if (hidden < 1 || hidden % heads != 0) {
    fail("hidden (" + std::to_string(hidden) + ") must be a positive multiple of heads (" + std::to_string(heads) + ")");
  }
  if (batch < 1) fail("batch must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (!(wd >= 0.0)) fail("wd must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (epochs < 1) fail("epochs must be >= 1");
  if (patience < 1) fail("patience must be >= 1");
  if (repeats < 1) fail("repeats must be >= 1");
  if (jobs < 1) fail("jobs must be >= 1");
  if (folds < 2) fail("folds must be >= 2");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) fail("val-fraction must be in [0, 1)");
}

ModelConfig RunConfig::model_config(std::size_t input_dim, std::size_t num_classes) const {
  ModelConfig m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.heads = heads;
  m.layers = layers;
  m.num_classes = num_classes;
  m.lambda = lambda;
  m.spec = {mu, sampler};
  m.dropout = dropout;
  m.score_gating = score_gating;
  return m;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    base.set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

}  // namespace gtpool
