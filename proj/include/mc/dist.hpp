#pragma once

#include <vector>

#include "mc/core.hpp"

namespace mc {

inline constexpr double kLog2Pi = 1.8378770664093454836;

double normal_log_pdf(double x, double mean, double sd);

// Multivariate normal with a cached Cholesky factor.
class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(Vec mean, const Mat& cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }
  void set_mean(Vec mean) { mean_ = std::move(mean); }

  double log_pdf(const Vec& x) const;
  // log N(x; m, cov) using this covariance and the given mean
  double log_pdf(const Vec& x, const Vec& m) const;
  Vec sample(RandomStream& rng) const;
  Vec sample(RandomStream& rng, const Vec& m) const;

 private:
  Vec mean_;
  Mat cov_;
  Mat chol_;  // lower factor
  double log_norm_ = 0.0;
};

// Gaussian random walk N(given, cov).
Proposal gaussian_random_walk(const Mat& cov);
Proposal gaussian_random_walk(int dim, double sigma);
// State-independent N(mean, cov).
Proposal gaussian_independent(const Vec& mean, const Mat& cov);
// Uniform on the box [lo, hi], state-independent.
Proposal uniform_box(const Vec& lo, const Vec& hi);

// Finite discrete state space {0, ..., K-1} embedded as 1-D points. Used by the
// exact-kernel checks.
LogTarget discrete_target(const std::vector<double>& probs);
// Proposal with transition matrix Q(i, j) = q(j | i); rows must sum to 1.
Proposal discrete_proposal(const Mat& Q);
// State-independent discrete proposal.
Proposal discrete_independent(const std::vector<double>& probs);

}  // namespace mc
