#include "mc/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mc/bench/samplers.hpp"

namespace mc::bench {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Params::str(const std::string& key, const std::string& def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

std::optional<double> Params::maybe_num(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' is not a number: " + it->second);
  }
  if (pos != it->second.size()) throw ConfigError("'" + key + "' is not a number: " + it->second);
  return v;
}

double Params::num(const std::string& key, double def) const {
  return maybe_num(key).value_or(def);
}

long Params::integer(const std::string& key, long def) const {
  auto v = maybe_num(key);
  if (!v) return def;
  if (*v != static_cast<double>(static_cast<long>(*v)))
    throw ConfigError("'" + key + "' must be an integer");
  return static_cast<long>(*v);
}

Params parse_config(std::istream& in) {
  Params p;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    p.set(section.empty() ? key : section + "." + key, value);
  }
  return p;
}

Params parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse_config(f);
}

ExperimentConfig make_config(const Params& p) {
  ExperimentConfig c;
  c.experiment = p.str("experiment", "");
  c.sampler = p.str("sampler", "");
  c.replicates = p.integer("replicates", 1);
  const long seed = p.integer("seed", 1);
  if (seed < 0) throw ConfigError("seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.out = p.str("out", "");
  auto opt = [&](const char* k) -> std::optional<long> {
    const std::string key = std::string("budget.") + k;
    if (!p.has(key)) return std::nullopt;
    return p.integer(key, 0);
  };
  c.budget = {opt("T"), opt("N"), opt("M"), opt("K")};
  for (const auto& [k, v] : p.values())
    if (k.rfind("params.", 0) == 0) c.params.set(k.substr(7), v);
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.experiment.empty()) throw ConfigError("missing experiment");
  if (c.sampler.empty()) throw ConfigError("missing sampler");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  const auto samplers = sampler_names(c.experiment);
  if (std::find(samplers.begin(), samplers.end(), c.sampler) == samplers.end())
    throw ConfigError("sampler '" + c.sampler + "' does not apply to experiment '" + c.experiment + "'");
  if (c.replicates < 1) throw ConfigError("replicates must be at least 1");
  for (auto v : {c.budget.T, c.budget.N, c.budget.M, c.budget.K})
    if (v && *v < 1) throw ConfigError("budget entries must be positive");
  // Evaluation-count contracts.
  if (c.experiment == "gm2d5" && c.params.has("L") && c.budget.T && c.budget.N) {
    const long K = c.budget.K.value_or(1);
    if (K * *c.budget.N * *c.budget.T != c.params.integer("L", 0))
      throw ConfigError("budget: K*N*T must equal L");
  }
  if ((c.experiment == "wsn" || c.experiment == "spectral") && c.params.has("E") && c.budget.N) {
    const long E = c.params.integer("E", 0), N = *c.budget.N;
    if (c.sampler == "omcmc_approx") {
      if (c.budget.M && *c.budget.M * (N + 1) != E) throw ConfigError("budget: M*(N+1) must equal E");
    } else if (c.budget.T && N * *c.budget.T != E) {
      throw ConfigError("budget: N*T must equal E");
    }
  }
}

}  // namespace mc::bench
