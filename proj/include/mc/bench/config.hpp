#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "mc/core.hpp"

namespace mc::bench {

// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Flat key/value store; nested sections become dotted keys ("budget.T").
class Params {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string str(const std::string& key, const std::string& def) const;
  double num(const std::string& key, double def) const;
  long integer(const std::string& key, long def) const;
  std::optional<double> maybe_num(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Text format: "key = value" lines, "[section]" headers that prefix the keys
// below them, '#' comments. Throws ConfigError with the line number.
Params parse_config(std::istream& in);
Params parse_config_file(const std::string& path);

struct Budget {
  std::optional<long> T, N, M, K;
};

struct ExperimentConfig {
  std::string experiment;
  std::string sampler;
  Params params;  // sampler parameters ("params." prefix stripped)
  Budget budget;
  long replicates = 1;
  std::uint64_t seed = 1;
  std::string out;
};

// Builds and validates a config (experiment/sampler names, budget products).
ExperimentConfig make_config(const Params& p);
void validate(const ExperimentConfig& cfg);

}  // namespace mc::bench
