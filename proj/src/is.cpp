#include "mc/is.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace mc {

ParticleSet is_weights(const std::vector<Vec>& points, const LogTarget& target,
                       const Proposal& proposal) {
  ParticleSet ps;
  for (const auto& x : points) {
    const double lq = proposal.log_q(x);
    if (lq == kNegInf) throw Error("sample outside proposal support");
    ps.add(x, target.log_density(x) - lq);
  }
  return ps;
}

ParticleSet mis_weights(const std::vector<Vec>& points, const LogTarget& target,
                        const std::vector<Proposal>& proposals, MisScheme scheme) {
  if (points.size() != proposals.size()) throw Error("mis_weights: one point per proposal");
  const double log_n = std::log(static_cast<double>(proposals.size()));
  ParticleSet ps;
  std::vector<double> lq(proposals.size());
  for (std::size_t m = 0; m < points.size(); ++m) {
    double den;
    if (scheme == MisScheme::smis) {
      den = proposals[m].log_q(points[m]);
    } else {
      for (std::size_t j = 0; j < proposals.size(); ++j) lq[j] = proposals[j].log_q(points[m]);
      den = log_sum_exp(lq) - log_n;
    }
    if (den == kNegInf) throw Error("sample outside proposal support");
    ps.add(points[m], target.log_density(points[m]) - den);
  }
  return ps;
}

double unnormalized_estimate(const ParticleSet& ps, const ScalarFn& g, double Z) {
  if (!(Z > 0.0)) throw Error("unnormalized_estimate: Z must be positive");
  if (ps.empty()) throw Error("no samples");
  double s = 0.0;
  for (const auto& w : ps.samples())
    if (w.log_weight != kNegInf) s += w.weight() * g(w.point);
  return s / (static_cast<double>(ps.size()) * Z);
}

double self_normalized_estimate(const ParticleSet& ps, const ScalarFn& g) {
  const std::vector<double> w = ps.normalized_weights();
  double s = 0.0;
  for (std::size_t m = 0; m < ps.size(); ++m)
    if (w[m] > 0.0) s += w[m] * g(ps[m].point);
  return s;
}

Vec self_normalized_mean(const ParticleSet& ps) {
  const std::vector<double> w = ps.normalized_weights();
  Vec s = Vec::Zero(ps[0].point.size());
  for (std::size_t m = 0; m < ps.size(); ++m)
    if (w[m] > 0.0) s += w[m] * ps[m].point;
  return s;
}

double ess_from_log_weights(const std::vector<double>& lw, EssVariant variant) {
  const double lse = log_sum_exp(lw);
  if (lse == kNegInf || std::isnan(lse)) throw Error("degenerate weights");
  double sq = 0.0, mx = 0.0;
  for (double l : lw) {
    const double w = std::exp(l - lse);
    sq += w * w;
    mx = std::max(mx, w);
  }
  const double M = static_cast<double>(lw.size());
  const double e = variant == EssVariant::inv_sum_sq ? 1.0 / sq : 1.0 / mx;
  return std::clamp(e, 1.0, M);  // rounding can push a hair outside [1, M]
}

double ess_is(const ParticleSet& ps, EssVariant variant) {
  return ess_from_log_weights(ps.log_weights(), variant);
}

bool heavy_weight_flag(const ParticleSet& ps, double share) {
  const std::vector<double> w = ps.normalized_weights();
  return *std::max_element(w.begin(), w.end()) > share;
}

double ProperSample::weight() const { return std::exp(log_weight); }
double GroupSummary::weight() const { return std::exp(log_weight); }

ProperSample resample_one(const ParticleSet& ps, RandomStream& rng) {
  if (ps.empty()) throw Error("degenerate weights");
  const std::vector<double> lw = ps.log_weights();
  if (log_sum_exp(lw) == kNegInf) throw Error("degenerate weights");
  const std::size_t i = rng.categorical_log(lw);
  return {ps[i].point, ps.log_z_hat()};
}

std::vector<GroupSummary> group_summarize(const std::vector<ParticleSet>& groups,
                                          RandomStream& rng) {
  std::vector<GroupSummary> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.empty()) throw Error("empty group");
    GroupSummary s;
    s.size = g.size();
    s.log_z = g.log_z_hat();
    s.log_weight = std::log(static_cast<double>(s.size)) + s.log_z;
    if (s.log_z == kNegInf) {
      s.point = g[0].point;  // weighted out either way
    } else {
      s.point = g[rng.categorical_log(g.log_weights())].point;
    }
    out.push_back(std::move(s));
  }
  return out;
}

double group_estimate(const std::vector<GroupSummary>& summaries, const ScalarFn& g) {
  std::vector<double> lw;
  lw.reserve(summaries.size());
  for (const auto& s : summaries) lw.push_back(s.log_weight);
  const double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw Error("degenerate weights");
  double acc = 0.0;
  for (const auto& s : summaries)
    if (s.log_weight != kNegInf) acc += std::exp(s.log_weight - lse) * g(s.point);
  return acc;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("trapezoid: need matching grids");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw Error("linspace: need at least 2 points");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

double pearson_chi2_1d(const Density1d& target_norm, const Density1d& proposal_norm,
                       const std::vector<double>& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = target_norm(grid[i]), q = proposal_norm(grid[i]);
    if (q <= 0.0) {
      if (p > 0.0) throw Error("pearson_chi2_1d: proposal vanishes where the target does not");
      f[i] = 0.0;
      continue;
    }
    f[i] = (p - q) * (p - q) / q;
  }
  return trapezoid(grid, f);
}

std::vector<double> optimal_proposal_density_1d(const Density1d& target_norm, const Density1d& g,
                                                const std::vector<double>& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = std::fabs(g(grid[i])) * target_norm(grid[i]);
  const double z = trapezoid(grid, f);
  if (!(z > 0.0)) throw Error("optimal proposal: integral of |g| pi is zero");
  for (double& v : f) v /= z;
  return f;
}

void write_particles_csv(const ParticleSet& ps, std::ostream& os) {
  const Eigen::Index D = ps.empty() ? 0 : ps[0].point.size();
  for (Eigen::Index d = 0; d < D; ++d) os << 'x' << d << ',';
  os << "weight\n";
  char buf[32];
  for (const auto& s : ps.samples()) {
    for (Eigen::Index d = 0; d < D; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", s.point[d]);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", s.weight());
    os << buf << '\n';
  }
}

}  // namespace mc
