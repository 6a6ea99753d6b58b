#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mc/core.hpp"
#include "mc/is.hpp"

namespace mc {

// Target and proposal factorized over D stages (0-based d here). x_prev is null
// at d = 0.
struct SequentialModel {
  int stages = 1;
  int state_dim = 1;
  std::function<double(int d, const Vec& x, const Vec* x_prev)> log_gamma;
  std::function<Vec(int d, const Vec* x_prev, RandomStream& rng)> sample_q;
  std::function<double(int d, const Vec& x, const Vec* x_prev)> log_q;
};

using Path = std::vector<Vec>;

// Concatenates the stages of a path into one vector.
Vec flatten(const Path& path);
Path unflatten(const Vec& x, int stages, int state_dim);

// The product of the stage factors and of the stage proposals as ordinary
// densities on flattened paths. The proposal draws stages in order, so a
// stream used by it yields the same path as a particle propagated with it.
LogTarget joint_target(const SequentialModel& model);
Proposal joint_proposal(const SequentialModel& model);

enum class ResamplingScheme { multinomial, systematic };

struct ParticleSystem {
  std::vector<Path> paths;
  std::vector<double> log_w;  // current cumulative weights
  int stage = 0;              // stages completed

  // Per-stage records, indexed by stage.
  std::vector<std::vector<Vec>> states;         // x_d of every particle before resampling
  std::vector<std::vector<double>> log_beta;
  std::vector<std::vector<double>> log_w_pre;   // before any resampling at that stage
  std::vector<std::vector<std::size_t>> ancestors;  // empty when the stage did not resample
  std::vector<double> log_z_hat;                // log of the mean pre-resampling weight
  std::vector<char> resampled;

  // log Z_tilde accumulated one resampling epoch at a time.
  double log_z_tilde = 0.0;
  double epoch_start_lse = 0.0;

  // One substream per particle (empty when M == 1: the caller's stream is used).
  std::vector<RandomStream> streams;

  std::size_t size() const { return paths.size(); }
  // log of the mean current weight.
  double log_z() const { return log_mean_exp(log_w); }
  ParticleSet particles() const;
};

ParticleSystem sis_init(std::size_t M, RandomStream& rng);

// Propagates every particle one stage and multiplies in beta = gamma / q.
void sis_advance(ParticleSystem& sys, const SequentialModel& model, RandomStream& rng);

struct SirOptions {
  double eta = 1.0;  // resample when ESS < eta M
  EssVariant ess = EssVariant::inv_sum_sq;
  ResamplingScheme scheme = ResamplingScheme::multinomial;
};

struct SirResult {
  ParticleSystem system;
  double log_z_hat;    // log mean final weight
  double log_z_tilde;  // log prod_d sum_m wbar_{d-1} beta_d
};

SirResult sir_run(const SequentialModel& model, std::size_t M, const SirOptions& opt,
                  RandomStream& rng);

// The same product computed literally from the stored stage records.
double marginal_z_tilde(const ParticleSystem& sys);

std::vector<std::size_t> resample_indices(const std::vector<double>& log_w, std::size_t count,
                                          ResamplingScheme scheme, RandomStream& rng);

// Particle 0 carries the reference path at every stage; the other M-1 slots are
// propagated and conditionally resampled at every stage, after which all
// weights are set to Z_hat_d. Throws "invalid reference" when a reference
// factor vanishes.
ParticleSystem cpf_run(const SequentialModel& model, const Path& reference, std::size_t M,
                       RandomStream& rng);

// CSV with columns stage, particle, x0.., weight, ancestor.
void write_particle_dump(const ParticleSystem& sys, std::ostream& os);

}  // namespace mc
