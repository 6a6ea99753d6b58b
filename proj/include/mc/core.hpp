#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mc/random.hpp"

namespace mc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Invalid input or a violated contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or other breakdowns of the arithmetic.
class NumericalError : public Error {
 public:
  using Error::Error;
};

double log_sum_exp(const std::vector<double>& v);
// log((1/n) sum exp(v_i))
double log_mean_exp(const std::vector<double>& v);

// Unnormalized log-density. log_density may return -inf outside the support.
struct LogTarget {
  int dim = 1;
  std::function<double(const Vec&)> log_density;
  // Optional gradient of log_density.
  std::function<Vec(const Vec&)> grad_log;
  // Optional sequential factorization: log_factor(d, x) is log gamma_d(x_d | x_{d-1})
  // for d >= 1 and log gamma_0(x_0) for d == 0 (0-based stages, one per coordinate).
  std::function<double(int, const Vec&)> log_factor;

  double operator()(const Vec& x) const { return log_density(x); }
  bool has_grad() const { return static_cast<bool>(grad_log); }
  bool has_factors() const { return static_cast<bool>(log_factor); }
};

// True when exp(sum_d log_factor) matches exp(log_density) on every point to
// relative tolerance rtol.
bool factors_consistent(const LogTarget& target, const std::vector<Vec>& points,
                        double rtol = 1e-10);

// Sampler plus log-density, optionally conditioned on a point (nullptr = none).
struct Proposal {
  int dim = 1;
  std::function<Vec(RandomStream&, const Vec*)> sample;
  std::function<double(const Vec&, const Vec*)> log_density;
  bool symmetric = false;

  Vec draw(RandomStream& rng) const { return sample(rng, nullptr); }
  Vec draw(RandomStream& rng, const Vec& given) const { return sample(rng, &given); }
  double log_q(const Vec& x) const { return log_density(x, nullptr); }
  double log_q(const Vec& x, const Vec& given) const { return log_density(x, &given); }
};

struct WeightedSample {
  Vec point;
  double log_weight = kNegInf;

  double weight() const;
};

// Weighted points. Weights are kept as logs; z_hat() is the plain mean of the
// raw weights and is always computed from the current contents.
class ParticleSet {
 public:
  ParticleSet() = default;
  explicit ParticleSet(std::vector<WeightedSample> samples) : samples_(std::move(samples)) {}

  void add(Vec point, double log_weight) { samples_.push_back({std::move(point), log_weight}); }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const WeightedSample& operator[](std::size_t i) const { return samples_[i]; }
  WeightedSample& operator[](std::size_t i) { return samples_[i]; }
  const std::vector<WeightedSample>& samples() const { return samples_; }
  std::vector<WeightedSample>& samples() { return samples_; }

  std::vector<double> log_weights() const;
  std::vector<double> weights() const;
  // Normalized weights; throws "degenerate weights" when all weights are zero.
  std::vector<double> normalized_weights() const;
  double z_hat() const;
  double log_z_hat() const;

 private:
  std::vector<WeightedSample> samples_;
};

double mc_estimate(const std::vector<Vec>& samples, const std::function<double(const Vec&)>& g);

struct RejectionResult {
  std::vector<Vec> points;
  std::size_t attempts = 0;
};

// Draws M points from the target using the envelope exp(log_C) * q. Throws
// "bound violated" when a drawn point has log pi - log q > log_C.
RejectionResult rejection_sample(const LogTarget& target, const Proposal& proposal, double log_C,
                                 std::size_t M, RandomStream& rng);

// Z_target / (C * Z_proposal)
double theoretical_rs_acceptance(double z_target, double z_proposal, double C);

}  // namespace mc
