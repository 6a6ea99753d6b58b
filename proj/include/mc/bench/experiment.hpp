#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mc/bench/config.hpp"
#include "mc/bench/samplers.hpp"

namespace mc::bench {

struct Report {
  ExperimentConfig config;
  std::vector<Outcome> replicates;
  Vec mse;                 // per component, against each replicate's truth
  double mse_mean = 0.0;   // averaged over components
  double wall_time_s = 0.0;
  nlohmann::json summary;  // everything above plus metric averages
};

// Runs cfg.replicates independent replicates on split streams of cfg.seed.
Outcome run_replicate(const ExperimentConfig& cfg, RandomStream& rng);
Report run_experiment(const ExperimentConfig& cfg);

// One row per replicate; no timing data, so equal seeds give equal bytes.
void write_replicates_csv(const Report& r, std::ostream& os);
void write_replicates_jsonl(const Report& r, std::ostream& os);
// Mean acceptance probability per iteration over replicates (gm1d with track_alpha).
void write_alpha_csv(const Report& r, std::ostream& os);

// Writes replicates.csv, replicates.jsonl, summary.json (and alpha.csv when
// tracked) under cfg.out. Does nothing when cfg.out is empty.
void write_report(const Report& r);

}  // namespace mc::bench
