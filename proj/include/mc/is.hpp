#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mc/core.hpp"

namespace mc {

using ScalarFn = std::function<double(const Vec&)>;

// w_m = pi(x_m) / q(x_m). Throws "sample outside proposal support" when q = 0.
ParticleSet is_weights(const std::vector<Vec>& points, const LogTarget& target,
                       const Proposal& proposal);

enum class MisScheme { smis, dm };

// points[m] must come from proposals[m]. s-MIS divides by q_m(x_m), DM by the
// equal-weight mixture of all proposals.
ParticleSet mis_weights(const std::vector<Vec>& points, const LogTarget& target,
                        const std::vector<Proposal>& proposals, MisScheme scheme);

// (1 / (M Z)) sum w g
double unnormalized_estimate(const ParticleSet& ps, const ScalarFn& g, double Z);
// (1 / (M Z_hat)) sum w g. Throws "degenerate weights" when all weights vanish.
double self_normalized_estimate(const ParticleSet& ps, const ScalarFn& g);
Vec self_normalized_mean(const ParticleSet& ps);

enum class EssVariant { inv_sum_sq, inv_max };
double ess_is(const ParticleSet& ps, EssVariant variant = EssVariant::inv_sum_sq);
double ess_from_log_weights(const std::vector<double>& log_weights,
                            EssVariant variant = EssVariant::inv_sum_sq);

// True when the largest normalized weight exceeds `share`.
bool heavy_weight_flag(const ParticleSet& ps, double share = 0.99);

struct ProperSample {
  Vec point;
  double log_weight = kNegInf;  // log Z_hat of the set it came from
  double weight() const;
};

ProperSample resample_one(const ParticleSet& ps, RandomStream& rng);

struct GroupSummary {
  Vec point;
  double log_weight = kNegInf;  // log(M_l Z_l)
  std::size_t size = 0;
  double log_z = kNegInf;
  double weight() const;
};

std::vector<GroupSummary> group_summarize(const std::vector<ParticleSet>& groups,
                                          RandomStream& rng);
double group_estimate(const std::vector<GroupSummary>& summaries, const ScalarFn& g);

using Density1d = std::function<double(double)>;

// Trapezoid integral of (pi - q)^2 / q over the grid; both arguments are
// normalized densities.
double pearson_chi2_1d(const Density1d& target_norm, const Density1d& proposal_norm,
                       const std::vector<double>& grid);

// |g| pi normalized by the trapezoid rule on the grid.
std::vector<double> optimal_proposal_density_1d(const Density1d& target_norm, const Density1d& g,
                                                const std::vector<double>& grid);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> linspace(double lo, double hi, std::size_t n);

// Columns x0.., weight (raw, not log).
void write_particles_csv(const ParticleSet& ps, std::ostream& os);

}  // namespace mc
