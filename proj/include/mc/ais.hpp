#pragma once

#include <string>
#include <vector>

#include "mc/core.hpp"
#include "mc/dist.hpp"

namespace mc {

// How the weight denominator Phi_{n,t} is formed.
enum class Denominator {
  own,               // q_{n,t}
  temporal_mixture,  // (1/t) sum_tau q_{n,tau}
  spatial_mixture,   // (1/N) sum_j q_{j,t}
};

enum class Adaptation {
  none,
  resample_global,  // N new means drawn from all N*M weighted samples
  resample_local,   // each mean drawn from its own M samples
  moment_fit,       // each mean moved to the weighted mean of its own samples
  mcmc_move,        // one MH step per mean, using that proposal as a random walk
  gradient_move,    // gradient ascent on log pi
};

// Gaussian proposals with adapted means and fixed covariances.
struct ProposalPopulation {
  std::vector<Vec> means;
  std::vector<Mat> scales;
  Denominator denominator = Denominator::own;
  Adaptation rule = Adaptation::none;
  std::size_t t = 0;                          // completed iterations
  std::vector<std::vector<Vec>> mean_history; // means used at each past iteration

  std::size_t size() const { return means.size(); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
};

ProposalPopulation make_population(const std::vector<Vec>& means, const Mat& scale,
                                   Denominator denominator, Adaptation rule);

struct AisIteration {
  ParticleSet samples;             // N*M points, proposal n owns [n*M, (n+1)*M)
  std::vector<double> log_target;  // log pi at each point
  std::size_t t = 0;               // 1-based iteration index
  bool degenerate = false;         // zero total weight; means left unchanged
  double ess = 0.0;
};

// Samples, weights and adapts the population in place.
AisIteration ais_iteration(ProposalPopulation& pop, const LogTarget& target, std::size_t M,
                           RandomStream& rng);

struct AisEstimate {
  Vec mean;          // self-normalized pooled mean
  double log_z;      // log of the mean of all weights
  std::size_t count;
};

AisEstimate ais_estimate(const std::vector<ParticleSet>& pool);
double ais_estimate(const std::vector<ParticleSet>& pool, const std::function<double(const Vec&)>& g);
// Unnormalized pooled estimator (1 / (count Z)) sum w g.
double ais_unnormalized_estimate(const std::vector<ParticleSet>& pool,
                                 const std::function<double(const Vec&)>& g, double Z);

// Recomputes every stored sample's weight with the temporal mixture over all
// recorded iterations; history[tau] lists the proposal means used at tau.
ParticleSet amis_reweight(const std::vector<std::vector<Vec>>& history,
                          const std::vector<Mat>& scales, const std::vector<Vec>& points,
                          const std::vector<double>& log_target);

// One JSON object: t, means, ess, log_z.
std::string ais_log_line(const ProposalPopulation& pop, const AisIteration& it);

}  // namespace mc
