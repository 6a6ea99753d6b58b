#pragma once

#include <map>
#include <string>
#include <vector>

#include "mc/bench/config.hpp"
#include "mc/core.hpp"

namespace mc::bench {

// Result of one replicate of one sampler.
struct Outcome {
  Vec estimate;
  Vec truth;
  double log_z = std::numeric_limits<double>::quiet_NaN();
  std::size_t evaluations = 0;  // target evaluations spent
  std::map<std::string, double> metrics;
  std::vector<double> alpha;    // per-iteration acceptance probabilities, if tracked
};

const std::vector<std::string>& experiment_names();
std::vector<std::string> sampler_names(const std::string& experiment);
std::string describe_experiment(const std::string& experiment);

// ---- gm1d: agm_mh, am, rwmh -----------------------------------------------

struct Gm1dSettings {
  int modes = 3;
  std::size_t T = 5000;
  std::size_t T_train = 200;
  double sigma0_sq = 10.0;  // initial proposal variance (AGM-MH components, AM)
  double rw_sigma = 5.0;    // standard random-walk MH
  double am_lambda0 = 5.6644;  // AM scale on the empirical covariance, 2.38^2 / d
  bool am_adapt_scale = true;
  bool track_alpha = false;
};
Gm1dSettings gm1d_settings(const Params& p, const Budget& b);
Outcome run_gm1d(const std::string& sampler, const Gm1dSettings& s, RandomStream& rng);

// ---- gm2d5: pmc, lr_pmc, gr_pmc, amis -------------------------------------

struct Gm2dSettings {
  std::size_t N = 100;  // proposals
  std::size_t K = 1;    // samples per proposal and iteration
  std::size_t T = 0;    // iterations; 0 means L / (K N)
  std::size_t L = 200000;
  double sigma = 2.0;
  double init_half_width = 4.0;  // means start uniform on [-4, 4]^2
};
Gm2dSettings gm2d_settings(const std::string& sampler, const Params& p, const Budget& b);
Outcome run_gm2d5(const std::string& sampler, const Gm2dSettings& s, RandomStream& rng);

// ---- logistic_map: fuss_gibbs, mh_gibbs -----------------------------------

struct LogisticSettings {
  double R = 3.7, Omega = 0.4, lambda = 0.05;
  int T_obs = 20;
  std::size_t N_G = 50;  // Gibbs sweeps
  double delta = 1e-3;
  std::size_t K_keep = 10;
  double grid_lo = 1e-4, grid_hi = 20.0, grid_step = 1e-4;
  int T_MH = 1;          // inner MH steps per conditional
  double sigma_p = 1.0;  // MH-within-Gibbs random walk
};
LogisticSettings logistic_settings(const Params& p, const Budget& b);
Outcome run_logistic(const std::string& sampler, const LogisticSettings& s, RandomStream& rng);

// ---- wsn: gms, mh_parallel --------------------------------------------------

struct WsnSettings {
  std::size_t N = 500;
  std::size_t E = 10000;
  double sigma = 1.0;
  double train_fraction = 0.2;
  std::uint64_t data_seed = 7;
};
WsnSettings wsn_settings(const Params& p, const Budget& b);
// The observation matrix used by every replicate, regenerated from data_seed.
Mat wsn_dataset(const WsnSettings& s);
Outcome run_wsn(const std::string& sampler, const WsnSettings& s, const Mat& Y, RandomStream& rng);

// ---- spectral: omcmc_approx, ipc ------------------------------------------

struct SpectralSettings {
  std::size_t N = 5;      // chains
  std::size_t E = 2730;   // target evaluations
  double sigma = 0.1;     // random-walk scale
  double sigma_w = 0.5;   // noise level of the generated data
  int L = 10;
  Vec f = (Vec(2) << 0.1, 0.3).finished();
};
SpectralSettings spectral_settings(const Params& p, const Budget& b);
// omcmc_approx: parallel MH chains plus one population-proposal exchange move
// per epoch, E = epochs * (N + 1). ipc: N independent chains, E = N * T.
Outcome run_spectral(const std::string& sampler, const SpectralSettings& s, RandomStream& rng);

}  // namespace mc::bench
