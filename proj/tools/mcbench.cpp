// mcbench: runs the benchmark experiments from the command line.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mc/bench/config.hpp"
#include "mc/bench/experiment.hpp"
#include "mc/bench/samplers.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

int run(const std::string& config_path, const std::string& experiment, const std::string& sampler,
        const std::vector<std::string>& sets, long seed, long replicates, const std::string& out) {
  using namespace mc::bench;
  Params p;
  if (!config_path.empty()) p = parse_config_file(config_path);
  if (!experiment.empty()) p.set("experiment", experiment);
  if (!sampler.empty()) p.set("sampler", sampler);
  if (seed >= 0) p.set("seed", std::to_string(seed));
  if (replicates > 0) p.set("replicates", std::to_string(replicates));
  if (!out.empty()) p.set("out", out);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    if (key.find('.') == std::string::npos) key = "params." + key;
    p.set(key, kv.substr(eq + 1));
  }
  const ExperimentConfig cfg = make_config(p);
  const Report rep = run_experiment(cfg);
  write_report(rep);
  std::cout << rep.summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo benchmark runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List experiments and their samplers");

  std::string describe_name;
  auto* describe = app.add_subcommand("describe", "Describe one experiment");
  describe->add_option("experiment,--experiment", describe_name, "Experiment id")->required();

  std::string config_path, experiment, sampler, out;
  std::vector<std::string> sets;
  long seed = -1, replicates = 0;
  auto* runc = app.add_subcommand("run", "Run an experiment");
  runc->add_option("--config", config_path, "Config file (key = value, [section] headers)");
  runc->add_option("--experiment", experiment, "Experiment id");
  runc->add_option("--sampler", sampler, "Sampler id");
  runc->add_option("--seed", seed, "Root seed")->check(CLI::NonNegativeNumber);
  runc->add_option("--replicates", replicates, "Number of replicates")->check(CLI::PositiveNumber);
  runc->add_option("--out", out, "Output directory");
  runc->add_option("--set", sets, "Sampler parameter key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*list) {
      for (const auto& e : mc::bench::experiment_names()) {
        std::cout << e << ":";
        for (const auto& s : mc::bench::sampler_names(e)) std::cout << " " << s;
        std::cout << "\n";
      }
      return 0;
    }
    if (*describe) {
      std::cout << mc::bench::describe_experiment(describe_name) << "\n";
      return 0;
    }
    return run(config_path, experiment, sampler, sets, seed, replicates, out);
  } catch (const mc::bench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mc::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}
