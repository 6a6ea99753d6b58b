#pragma once

#include <vector>

#include "mc/core.hpp"

namespace mc::bench {

// ---- 1-D Gaussian mixtures ------------------------------------------------

// Mode locations for M in {2, 3, 6}; throws for other M.
std::vector<double> gm1d_means(int M);
inline constexpr double kGm1dVariance = 4.0;

// Normalized equal-weight mixture of N(eta_i, 4), with gradient.
LogTarget target_gm1d(int M);

// ---- 2-D five-component mixture -------------------------------------------

struct Gm2dComponent {
  Vec mean;
  Mat cov;
};

std::vector<Gm2dComponent> gm2d5_components();
// Normalized (Z = 1) equal-weight mixture, with gradient.
LogTarget target_gm2d5();
Vec gm2d5_mean();  // [1.6, 1.4]

// ---- Noisy logistic map ---------------------------------------------------

struct LogisticTruth {
  double R = 3.7;
  double Omega = 0.4;
};

// z_1 .. z_T with z_{t+1} = R z_t (1 - z_t / Omega) exp(eps_t). z_1 is uniform
// on (0, min(1, Omega)); sequences that leave (0, Omega) are redrawn.
Vec logistic_generate(double R, double Omega, double lambda, int T, RandomStream& rng);

// Joint log posterior over (R, Omega) with uniform priors on [0, 1e4]^2.
// Throws on sequences with non-positive entries or fewer than two points.
LogTarget target_logistic_map(const Vec& z_obs, double lambda);

// Full conditionals of the logistic-map posterior. Per Omega the log density
// in r = log R is a quadratic whose coefficients are sums over the data, so
// both conditionals cost O(1) per point once those sums are tabulated.
class LogisticPosterior {
 public:
  LogisticPosterior(const Vec& z_obs, double lambda);

  double log_joint(double R, double Omega) const;
  // Log conditionals up to constants: R | Omega and Omega | R.
  double log_cond_R(double R, double Omega) const;
  double log_cond_Omega(double Omega, double R) const;

  // Tabulates the per-Omega sums on a grid; afterwards log_cond_Omega_on_grid
  // evaluates the conditional in O(1) per grid point.
  void tabulate_omega(const std::vector<double>& grid);
  std::vector<double> log_cond_Omega_on_grid(double R) const;
  std::vector<double> log_cond_R_on_grid(const std::vector<double>& grid, double Omega) const;

  // Posterior mean of (R, Omega) by integrating r out in closed form and
  // quadrature over Omega.
  Vec posterior_mean(double omega_hi = 20.0, std::size_t n = 200000) const;

  double max_z() const { return zmax_; }

 private:
  struct Sums {
    double S1, S2;  // sum l_t and sum (b_t - l_t)^2, l_t = log(1 - z_t / Omega)
  };
  Sums sums(double Omega) const;
  double log_from_sums(double r, const Sums& s) const;

  std::vector<double> z_, b_;  // transitions t = 1..T-1: z_t and log z_{t+1} - log z_t
  double sum_b_ = 0.0;
  double lambda_;
  double zmax_ = 0.0;
  std::vector<Sums> grid_sums_;
  std::vector<double> grid_;
};

// ---- Sensor-network localization ------------------------------------------

inline constexpr int kWsnSensors = 6;
inline constexpr int kWsnObservations = 20;

Mat wsn_sensor_positions();  // 6 x 2
Vec wsn_truth();             // [z1, z2, lambda_1..6]
// Y(k, j) = 20 log10 ||z - h_j|| + B, B ~ N(0, lambda_j^2); N_O x 6.
Mat wsn_generate(const Vec& truth, int n_obs, RandomStream& rng);
// Unnormalized log posterior over (z1, z2, lambda_1..6), dimension 8.
LogTarget target_wsn(const Mat& Y);

// ---- Spectral analysis ----------------------------------------------------

// y[k] = sum_i cos(2 pi f_i k) + N(0, sigma_w^2), k = 1..L.
Vec spectral_generate(const Vec& f, int L, double sigma_w, RandomStream& rng);
// V(theta) = (1 / (2 sigma_w^2)) sum_k (y[k] - sum_i cos(2 pi theta_i k))^2.
double spectral_potential(const Vec& theta, const Vec& y, double sigma_w);
// -V on [0, 1/2]^D, -inf outside.
LogTarget target_spectral(const Vec& y, double sigma_w, int dim);

}  // namespace mc::bench
