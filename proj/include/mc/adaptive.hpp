#pragma once

#include <functional>
#include <vector>

#include "mc/core.hpp"
#include "mc/mcmc.hpp"

namespace mc {

// ---- Adaptive Metropolis ---------------------------------------------------

struct AdaptiveState {
  Vec mean_est;
  Mat cov_est;          // Sigma_t, jitter included
  double scale = 1.0;   // lambda_t
  double eps = 1e-6;
  double target_ar = 0.234;
  std::function<double(std::size_t)> gain;  // gamma_t; null means t^-0.6
  bool adapt_cov = true;

  // Running moments of theta^(0..t).
  std::size_t count = 0;
  Mat scatter;

  double gain_at(std::size_t t) const;
};

// Starts the history at theta0 with proposal covariance cov0 and scale lambda0.
AdaptiveState am_init(const Vec& theta0, const Mat& cov0, double lambda0);

// Empirical covariance of the recorded history plus eps I (eps I alone for a
// single point). Throws NumericalError on non-finite entries.
Mat am_covariance(const AdaptiveState& a);

// Adds a point to the history and refreshes cov_est (when adapt_cov is set).
void am_record(AdaptiveState& a, const Vec& theta);

double optimal_scale(int dim);

// One AM transition from (state, logp_state), t >= 1. Proposes from
// N(state, scale * cov_est), then updates the history, cov_est and scale.
MhResult am_step(const Vec& state, double logp_state, AdaptiveState& a, const LogTarget& target,
                 std::size_t t, RandomStream& rng);

// ---- AGM-MH ---------------------------------------------------------------

// Diagonal Gaussian mixture used as a state-independent proposal.
struct MixtureProposal {
  std::vector<double> weights;
  std::vector<Vec> means;
  std::vector<Vec> variances;
  // Running responsibility counts and weighted squared deviations per component.
  std::vector<double> counts;
  std::vector<Vec> sq_dev;
  double var_floor = 1e-4;

  std::size_t size() const { return weights.size(); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
  double log_density(const Vec& x) const;
  Vec sample(RandomStream& rng) const;
  // Posterior component probabilities of x.
  std::vector<double> responsibilities(const Vec& x) const;
};

// Equal weights, one pseudo-observation per component at its initial moments.
MixtureProposal make_mixture(const std::vector<Vec>& means, const std::vector<Vec>& variances);

// Folds x into the component moments with responsibility-weighted running
// updates and renormalizes the weights.
void mixture_update(MixtureProposal& mix, const Vec& x);

// Independent MH step with the mixture; for t >= T_train the chain state after
// the step is folded into the mixture.
MhResult agm_mh_step(const Vec& state, double logp_state, MixtureProposal& mix,
                     const LogTarget& target, std::size_t t, std::size_t T_train,
                     RandomStream& rng);

// ---- Piecewise exponential proposals (ARMS, IA2RMS, FUSS) ---------------------

class PiecewiseProposal {
 public:
  struct Piece {
    double lo, hi;  // may be infinite at the two tails
    double x0, y0;  // W(x) = y0 + slope (x - x0)
    double slope;
    double log_mass;
    int interval;   // 0 = left tail, j = [p_{j-1}, p_j], K = right tail
  };

  PiecewiseProposal() = default;

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& log_values() const { return values_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t num_points() const { return support_.size(); }
  double log_total() const { return log_total_; }
  bool clipped() const { return clipped_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }

  // W(x): the unnormalized log envelope; -inf outside the domain.
  double log_envelope(double x) const;
  double log_density(double x) const { return log_envelope(x) - log_total_; }
  double sample(RandomStream& rng) const;
  // Normalized mass of each piece.
  std::vector<double> piece_probabilities() const;
  std::size_t piece_of(double x) const;

  // Copy with (x, log pi(x)) inserted; x must not already be a support point.
  PiecewiseProposal with_point(double x, double log_value) const;

  friend PiecewiseProposal build_envelope(std::vector<double>, std::vector<double>, double, double);
  friend PiecewiseProposal build_interpolant(std::vector<double>, std::vector<double>);

 private:
  std::vector<double> support_, values_;
  std::vector<Piece> pieces_;
  std::vector<double> cum_;  // cumulative normalized masses
  double log_total_ = kNegInf;
  double lo_ = -kInf, hi_ = kInf;
  bool clipped_ = false;
  bool envelope_ = true;

  void finalize();
};

// Envelope from sorted points and log pi values. Tails are extrapolated by the
// outermost secants and truncated to [lo, hi]; an unbounded tail whose mass
// would exceed 1e12 times the largest support value is cut at that mass.
PiecewiseProposal build_envelope(std::vector<double> points, std::vector<double> log_values,
                                 double lo = -kInf, double hi = kInf);
// Plain piecewise-linear interpolation of log pi on [points.front(), points.back()].
PiecewiseProposal build_interpolant(std::vector<double> points, std::vector<double> log_values);

PiecewiseProposal arms_build(const std::vector<double>& support,
                             const std::function<double(double)>& log_target,
                             double lo = -kInf, double hi = kInf);

struct ArmsResult {
  double state = 0.0;
  double log_density = kNegInf;
  bool accepted = false;
  int rs_rejections = 0;  // support points added by the rejection test
  bool added_aux = false; // IA2RMS step 2(f) added a point
};

// One chain step. RS rejections add the candidate to the support and retry
// without advancing the chain; the loop gives up after max_rs_rejections.
ArmsResult arms_step(double state, double logp_state, PiecewiseProposal& prop,
                     const std::function<double(double)>& log_target, RandomStream& rng,
                     int max_rs_rejections = 10000);

// ARMS step plus the IA2RMS control test on the point left behind.
ArmsResult ia2rms_step(double state, double logp_state, PiecewiseProposal& prop,
                       const std::function<double(double)>& log_target, RandomStream& rng,
                       int max_rs_rejections = 10000);

// RS test: passes unless u > pi / q.
bool arms_rs_pass(double u, double logp, double logq);
// IA2RMS step 2(f): true when u > q / pi, i.e. the point joins the support.
bool ia2rms_adds(double u, double logq, double logp);

// The acceptance probability shared by both samplers, with q = exp(W).
double arms_alpha(double logp_state, double logq_state, double logp_cand, double logq_cand);

// Piecewise-linear density through (x_i, exp(v_i)) on [x_0, x_K-1], used by
// FUSS. Between support points the density is the chord of the values, so in
// the tails it sits above a log-concave target.
class LinearDensityProposal {
 public:
  LinearDensityProposal(std::vector<double> points, std::vector<double> log_values);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& log_values() const { return values_; }
  std::size_t num_points() const { return support_.size(); }
  double lower() const { return support_.front(); }
  double upper() const { return support_.back(); }
  // log of the unnormalized chord value; -inf outside [lower, upper].
  double log_envelope(double x) const;
  double log_density(double x) const { return log_envelope(x) - log_total_; }
  double log_total() const { return log_total_; }
  // Piece by one uniform, then the inverse CDF of the linear density.
  double sample(RandomStream& rng) const;
  std::vector<double> piece_probabilities() const;

 private:
  std::vector<double> support_, values_;
  std::vector<double> e_;    // exp(v - vmax)
  std::vector<double> cum_;  // cumulative normalized piece masses
  double vmax_ = 0.0, log_total_ = kNegInf;
};

// Indices kept by the FUSS pruning of a sorted dense grid.
std::vector<std::size_t> fuss_prune(const std::vector<double>& grid,
                                    const std::vector<double>& log_values, double delta,
                                    std::size_t K_keep);

// Evaluates log_target on the grid, prunes, and builds the interpolating proposal.
LinearDensityProposal fuss_build(const std::vector<double>& grid,
                                 const std::function<double(double)>& log_target, double delta,
                                 std::size_t K_keep);
// Same, with log pi already evaluated on the grid.
LinearDensityProposal fuss_build_from_values(const std::vector<double>& grid,
                                             const std::vector<double>& log_values, double delta,
                                             std::size_t K_keep);

// T_MH independent MH steps on a 1-D conditional with a piecewise proposal.
double piecewise_mh(double state, const PiecewiseProposal& prop,
                    const std::function<double(double)>& log_target, int T_MH, RandomStream& rng,
                    int* accepted = nullptr);
double piecewise_mh(double state, const LinearDensityProposal& prop,
                    const std::function<double(double)>& log_target, int T_MH, RandomStream& rng,
                    int* accepted = nullptr);

}  // namespace mc
