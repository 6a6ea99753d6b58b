#include "mc/core.hpp"

#include <algorithm>
#include <cmath>

namespace mc {

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  if (mx == kInf) return kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double log_mean_exp(const std::vector<double>& v) {
  if (v.empty()) throw Error("log_mean_exp: empty input");
  return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

bool factors_consistent(const LogTarget& target, const std::vector<Vec>& points, double rtol) {
  if (!target.has_factors()) return false;
  for (const Vec& x : points) {
    double s = 0.0;
    for (int d = 0; d < target.dim; ++d) s += target.log_factor(d, x);
    const double full = target.log_density(x);
    if (s == kNegInf && full == kNegInf) continue;
    // |exp(s) / exp(full) - 1| <= rtol
    if (!(std::abs(std::expm1(s - full)) <= rtol)) return false;
  }
  return true;
}

double WeightedSample::weight() const { return std::exp(log_weight); }

std::vector<double> ParticleSet::log_weights() const {
  std::vector<double> lw(samples_.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = samples_[i].log_weight;
  return lw;
}

std::vector<double> ParticleSet::weights() const {
  std::vector<double> w(samples_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = samples_[i].weight();
  return w;
}

std::vector<double> ParticleSet::normalized_weights() const {
  const double lse = log_sum_exp(log_weights());
  if (!std::isfinite(lse)) throw Error("degenerate weights");
  std::vector<double> w(samples_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(samples_[i].log_weight - lse);
  return w;
}

double ParticleSet::z_hat() const {
  if (samples_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& ws : samples_) s += ws.weight();
  return s / static_cast<double>(samples_.size());
}

double ParticleSet::log_z_hat() const {
  if (samples_.empty()) return kNegInf;
  return log_mean_exp(log_weights());
}

double mc_estimate(const std::vector<Vec>& samples, const std::function<double(const Vec&)>& g) {
  if (samples.empty()) throw Error("no samples");
  double s = 0.0;
  for (const Vec& x : samples) s += g(x);
  return s / static_cast<double>(samples.size());
}

RejectionResult rejection_sample(const LogTarget& target, const Proposal& proposal, double log_C,
                                 std::size_t M, RandomStream& rng) {
  if (M == 0) throw Error("rejection_sample: M must be at least 1");
  RejectionResult out;
  out.points.reserve(M);
  while (out.points.size() < M) {
    Vec x = proposal.draw(rng);
    ++out.attempts;
    const double lq = proposal.log_q(x);
    if (lq == kNegInf) throw Error("invalid proposal sample");
    const double log_ratio = target.log_density(x) - lq;
    if (log_ratio > log_C) throw Error("bound violated");
    const double u = rng.uniform();
    if (std::log(u) <= log_ratio - log_C) out.points.push_back(std::move(x));
  }
  return out;
}

double theoretical_rs_acceptance(double z_target, double z_proposal, double C) {
  if (!(z_target > 0.0) || !(z_proposal > 0.0) || !(C > 0.0))
    throw Error("theoretical_rs_acceptance: inputs must be positive");
  return z_target / (C * z_proposal);
}

}  // namespace mc
