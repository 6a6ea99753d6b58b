#pragma once

#include <functional>

#include "mc/core.hpp"

namespace mc {

using LogPrior = std::function<double(const Vec&)>;

// Randomized estimate of the likelihood, returned as a log (-inf for zero).
struct LikelihoodEstimator {
  std::function<double(const Vec& theta, RandomStream& rng)> log_estimate;
  bool declared_unbiased = true;
  int inner_samples = 1;
};

enum class PseudoMarginal { gimh, mcwm };

struct PseudoMarginalResult {
  Vec state;
  double log_est = kNegInf;  // estimate attached to the returned state
  bool accepted = false;
  double alpha = 0.0;
  bool forced_reject = false;  // both estimates were zero
};

// Acceptance from cached log values: prior + estimate at each end plus the
// proposal terms log q(new | prev) and log q(prev | new).
double pseudo_marginal_alpha(double log_prior_prev, double log_est_prev, double log_prior_new,
                             double log_est_new, double log_q_fwd, double log_q_bwd);

// GIMH reuses log_est_prev; MCWM draws a fresh estimate at the current state
// after the one at the candidate.
PseudoMarginalResult pseudo_marginal_step(const Vec& state, double log_est_prev,
                                          const LogPrior& log_prior,
                                          const LikelihoodEstimator& lik, const Proposal& q,
                                          PseudoMarginal variant, RandomStream& rng);

// Single Variable Exchange with one auxiliary data set per step.
struct SveModel {
  std::function<double(const Vec& y, const Vec& theta)> log_phi;  // unnormalized likelihood
  LogPrior log_prior;
  std::function<Vec(const Vec& theta, RandomStream& rng)> simulate;  // exact draw y ~ l(.|theta)
};

struct SveResult {
  Vec state;
  Vec y;
  bool accepted = false;
  double alpha = 0.0;
  bool forced_reject = false;
};

double sve_alpha(const Vec& theta, const Vec& y_prev, const Vec& theta_new, const Vec& y_new,
                 const Vec& y_true, const SveModel& model, const Proposal& q);

SveResult sve_step(const Vec& state, const Vec& y_prev, const Vec& y_true, const SveModel& model,
                   const Proposal& q, RandomStream& rng);

enum class AbcKernelKind { indicator, gaussian };

struct AbcKernel {
  AbcKernelKind kind = AbcKernelKind::indicator;
  double eps = 1.0;
  // Optional summary statistic applied to data before the distance.
  std::function<Vec(const Vec&)> summary;

  double distance(const Vec& a, const Vec& b) const;
  // log h_eps at a distance; 0 is the maximum.
  double log_h(double dist) const;
};

struct AbcResult {
  Vec state;
  Vec y;
  bool accepted = false;
  double alpha = 0.0;
  double distance = 0.0;  // candidate data to observed data
};

using Simulator = std::function<Vec(const Vec& theta, RandomStream& rng)>;

AbcResult abc_mh_step(const Vec& state, const Vec& y_prev, const Vec& y_true,
                      const LogPrior& log_prior, const Proposal& q, const Simulator& simulate,
                      const AbcKernel& kernel, RandomStream& rng);

// Randomized acceptance ratio estimate for the move prev -> cand.
using RatioEstimator = std::function<double(const Vec& prev, const Vec& cand, RandomStream& rng)>;

struct NoisyResult {
  Vec state;
  bool accepted = false;
  double alpha = 0.0;
};

NoisyResult noisy_mh_step(const Vec& state, const Proposal& q, const RatioEstimator& rho_hat,
                          RandomStream& rng);

// The exact ratio pi(cand) q(prev|cand) / (pi(prev) q(cand|prev)).
RatioEstimator exact_ratio(const LogTarget& target, const Proposal& q);

}  // namespace mc
