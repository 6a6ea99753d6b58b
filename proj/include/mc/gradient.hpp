#pragma once

#include <functional>

#include "mc/core.hpp"
#include "mc/mcmc.hpp"

namespace mc {

struct PhasePoint {
  Vec theta;
  Vec p;
};

using GradFn = std::function<Vec(const Vec&)>;

// Mean and (isotropic) covariance of a Gaussian proposal.
struct GaussianParams {
  Vec mean;
  Mat cov;
};

// Langevin proposal N(theta + dtau/2 grad, dtau I).
GaussianParams mala_proposal(const Vec& state, const LogTarget& target, double dtau);

MhResult mala_step(const Vec& state, const LogTarget& target, double dtau, RandomStream& rng);

// L leapfrog steps: half momentum kick, full position drift, half kick.
PhasePoint leapfrog(const PhasePoint& start, const GradFn& grad_log, double dtau, int L);

// H = -log pi(theta) + |p|^2 / 2
double hamiltonian(const PhasePoint& pp, const LogTarget& target);

MhResult hmc_step(const Vec& state, const LogTarget& target, double dtau, int L,
                  RandomStream& rng);

// Distribution of the one-step HMC position, recovered from the leapfrog map
// (which is affine in the initial momentum).
GaussianParams hmc_one_step_proposal(const Vec& state, const LogTarget& target, double dtau);

// Central finite-difference gradient of log_density.
Vec finite_difference_grad(const LogTarget& target, const Vec& x, double h = 1e-5);

enum class GradientSampler { mala, hmc };

struct WarmupResult {
  double dtau;
  Vec state;
  double mean_alpha;  // over the second half of the warmup
};

// Tunes dtau so the mean acceptance approaches target_ar, using
// log dtau += t^-0.6 (alpha_t - target_ar).
WarmupResult warmup_step_size(GradientSampler kind, const Vec& init, const LogTarget& target,
                              double dtau0, int L, double target_ar, int iterations,
                              RandomStream& rng);

}  // namespace mc
