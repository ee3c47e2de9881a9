#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "gtpool/cli.hpp"
#include "gtpool/errors.hpp"

namespace gtpool::cli {
namespace {

struct RunOptions {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App& sub) {
    sub.add_option("--config", config_path, "flat key = value config file");
    for (const auto& key : RunConfig::keys()) sub.add_option("--" + key, values[key]);
  }

  RunConfig resolve(const CLI::App& sub) const {
    RunConfig c;
    if (const char* env = std::getenv("GTPOOL_DATA_ROOT"); env != nullptr && *env != '\0') c.data_root = env;
    if (!config_path.empty()) c = load_config_file(config_path, c);
    for (const auto& key : RunConfig::keys()) {
      if (sub.count("--" + key) > 0) c.set(key, values.at(key));
    }
    c.validate();
    return c;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GTPool graph classification toolkit", "gtpool"};
  app.require_subcommand(1);

  RunOptions train_opts, profile_opts, scale_opts, sweep_opts, folds_opts;
  auto* train = app.add_subcommand("train", "10-fold cross-validation; writes report.json and curves.csv");
  train_opts.attach(*train);

  auto* profile = app.add_subcommand("profile", "forward/backward milliseconds per training iteration");
  profile_opts.attach(*profile);
  std::size_t warmup = 10, iterations = 100;
  bool no_backward = false;
  profile->add_option("--warmup", warmup, "discarded warm-up iterations");
  profile->add_option("--iterations", iterations, "measured iterations (>= 100)");
  profile->add_flag("--no-backward", no_backward, "rejected: backward timing is always measured");

  auto* scale = app.add_subcommand("bench-scale", "forward+backward time on Erdos-Renyi graphs");
  scale_opts.attach(*scale);
  std::vector<std::size_t> node_counts = {500, 1000, 1200};
  std::vector<double> densities = {0.2, 0.4, 0.6, 0.8};
  scale->add_option("--nodes", node_counts, "node counts")->delimiter(',');
  scale->add_option("--densities", densities, "edge densities in (0, 1]")->delimiter(',');

  auto* demo = app.add_subcommand("sample-demo", "show the roulette wheel for a score vector");
  std::vector<double> scores;
  double demo_mu = 0.5;
  demo->add_option("--scores", scores, "positive node scores")->delimiter(',')->required();
  demo->add_option("--mu", demo_mu, "pooling ratio");

  auto* sweep_cmd = app.add_subcommand("sweep", "cross-validate once per value of one config key");
  sweep_opts.attach(*sweep_cmd);
  std::string axis, values;
  sweep_cmd->add_option("--axis", axis, "config key to vary")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();

  auto* folds_cmd = app.add_subcommand("folds", "export the stratified fold plan as JSON");
  folds_opts.attach(*folds_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*train) {
      cmd_train(train_opts.resolve(*train), out);
    } else if (*profile) {
      const RunConfig c = profile_opts.resolve(*profile);
      check_profile_args(iterations, !no_backward);
      const ProfileResult r = cmd_profile(c, load_dataset(c), warmup, iterations, !no_backward);
      out << std::fixed << std::setprecision(2) << "dataset,sampler,parameters,forward_ms,forward_std,backward_ms,backward_std\n"
          << c.dataset << ',' << sampler::method_name(c.sampler) << ',' << r.parameters << ',' << r.forward_mean_ms << ','
          << r.forward_std_ms << ',' << r.backward_mean_ms << ',' << r.backward_std_ms << '\n';
    } else if (*scale) {
      const RunConfig c = scale_opts.resolve(*scale);
      out << scale_table(cmd_bench_scale(c, node_counts, densities), node_counts, densities);
    } else if (*demo) {
      cmd_sample_demo(scores, demo_mu, out);
    } else if (*sweep_cmd) {
      const RunConfig c = sweep_opts.resolve(*sweep_cmd);
      const Dataset ds = load_dataset(c);
      const auto entries = sweep(c, ds, axis, split_list(values));
      const auto dir = make_run_dir(c.out, c.dataset + "-sweep-" + axis);
      for (const auto& e : entries) {
        std::ofstream(dir / ("report_" + axis + "_" + e.value + ".json")) << e.report.to_json();
      }
      const std::string table = sweep_table_csv(axis, entries);
      std::ofstream(dir / "sweep.csv") << table;
      out << table << "run directory: " << dir.string() << '\n';
    } else if (*folds_cmd) {
      const RunConfig c = folds_opts.resolve(*folds_cmd);
      out << stratified_folds(load_dataset(c), c.folds, c.seed).to_json() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ArgumentError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace gtpool::cli
