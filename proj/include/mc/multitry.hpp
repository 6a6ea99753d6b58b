#pragma once

#include <functional>
#include <vector>

#include "mc/core.hpp"
#include "mc/mcmc.hpp"

namespace mc {

// Candidates with importance weights pi/q; z_hat() is the mean weight.
using WeightedCandidateSet = ParticleSet;

struct MultiTryResult {
  Vec state;
  bool accepted = false;
  double alpha = 0.0;
  std::size_t selected = 0;
  bool degenerate = false;  // every try had zero weight; rejection was forced
};

// log w(y) = log pi(y) - log q(y | given), for each y.
std::vector<double> try_log_weights(const std::vector<Vec>& ys, const Vec* given,
                                    const LogTarget& target, const Proposal& q);

// MTM acceptance for a fixed draw: tries from q(.|state), selected index j and
// the N-1 auxiliary points drawn from q(.|tries[j]) (the j-th auxiliary is the
// state itself and is not passed).
double mtm_alpha(const Vec& state, const std::vector<Vec>& tries, std::size_t j,
                 const std::vector<Vec>& aux, const LogTarget& target, const Proposal& q);

MultiTryResult mtm_step(const Vec& state, const LogTarget& target, const Proposal& q,
                        std::size_t N, RandomStream& rng);

// min(1, Z1/Z2) with Z1 the mean try weight and Z2 the same mean with tries[j]
// swapped for the current state. q must be state-independent.
double imtm_alpha(const Vec& state, const std::vector<Vec>& tries, std::size_t j,
                  const LogTarget& target, const Proposal& q);

MultiTryResult imtm_step(const Vec& state, const LogTarget& target, const Proposal& q,
                         std::size_t N, RandomStream& rng);

struct Imtm2Result {
  Vec state;
  double log_z = kNegInf;  // carried log normalizer estimate
  bool accepted = false;
  double alpha = 0.0;
  std::vector<double> try_log_weights;
};

// log_z_prev must be finite ("invalid carried normalizer" otherwise).
Imtm2Result imtm2_step(const Vec& state, double log_z_prev, const LogTarget& target,
                       const Proposal& q, std::size_t N, RandomStream& rng);

// Draws N independent tries and their weights (the first half of an I-MTM2 or GMS step).
WeightedCandidateSet draw_candidate_set(const LogTarget& target, const Proposal& q, std::size_t N,
                                        RandomStream& rng);

struct GmsResult {
  WeightedCandidateSet set;
  double log_z = kNegInf;
  bool accepted = false;
  double alpha = 0.0;
};

GmsResult gms_step(const WeightedCandidateSet& set_prev, double log_z_prev,
                   const LogTarget& target, const Proposal& q, std::size_t N, RandomStream& rng);

// Estimator sum over sets of normalized-weight averages, divided by the number of sets.
double gms_estimate(const std::vector<WeightedCandidateSet>& sets,
                    const std::function<double(const Vec&)>& g);

// One state per set, resampled whenever the set changed and repeated otherwise.
std::vector<Vec> gms_recover_chain(const std::vector<WeightedCandidateSet>& sets,
                                   const std::vector<char>& accepted, const Vec& initial,
                                   RandomStream& rng);

// Selection probabilities over tries[0..N-1] followed by the current state.
std::vector<double> ensemble_probabilities(const Vec& state, const std::vector<Vec>& tries,
                                           const LogTarget& target, const Proposal& q);

MultiTryResult ensemble_step(const Vec& state, const LogTarget& target, const Proposal& q,
                             std::size_t N, RandomStream& rng);

// Second-stage proposal q2(y2 | x, y1).
struct DelayedProposal {
  std::function<Vec(RandomStream&, const Vec& x, const Vec& y1)> sample;
  std::function<double(const Vec& y2, const Vec& x, const Vec& y1)> log_density;
};

enum class DrmStage { first, second, reject };

struct DrmResult {
  Vec state;
  DrmStage stage = DrmStage::reject;
  double alpha1 = 0.0, alpha2 = 0.0;
  bool forced = false;  // zero denominator with a positive numerator
};

double drm_alpha1(const Vec& x, const Vec& y1, const LogTarget& target, const Proposal& q1);
// Second-stage acceptance for x -> y2 after y1 was rejected; sets *forced when
// the reverse path has zero density and the forward one does not.
double drm_alpha2(const Vec& x, const Vec& y1, const Vec& y2, const LogTarget& target,
                  const Proposal& q1, const DelayedProposal& q2, bool* forced = nullptr);

DrmResult drm_step(const Vec& state, const LogTarget& target, const Proposal& q1,
                   const DelayedProposal& q2, RandomStream& rng);

}  // namespace mc
