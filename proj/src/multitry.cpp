#include "mc/multitry.hpp"

#include <algorithm>
#include <cmath>

namespace mc {

namespace {

double ratio_alpha(double log_num, double log_den) {
  if (std::isnan(log_num) || std::isnan(log_den)) throw NumericalError("NaN in acceptance ratio");
  if (log_num == kNegInf || log_den == kInf) return 0.0;
  if (log_den == kNegInf) return 1.0;
  return std::min(1.0, std::exp(log_num - log_den));
}

double log_weight(const Vec& y, const Vec* given, const LogTarget& target, const Proposal& q) {
  const double lq = q.log_density(y, given);
  const double lp = target.log_density(y);
  if (lq == kNegInf) return lp == kNegInf ? kNegInf : kInf;
  return lp - lq;
}

std::vector<Vec> draw_tries(const Vec* given, const Proposal& q, std::size_t N,
                            RandomStream& rng) {
  std::vector<Vec> ys(N);
  for_each_stream(rng, N, [&](std::size_t i, RandomStream& s) { ys[i] = q.sample(s, given); });
  return ys;
}

bool all_neg_inf(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == kNegInf; });
}

}  // namespace

std::vector<double> try_log_weights(const std::vector<Vec>& ys, const Vec* given,
                                    const LogTarget& target, const Proposal& q) {
  std::vector<double> lw(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) lw[i] = log_weight(ys[i], given, target, q);
  return lw;
}

double mtm_alpha(const Vec& state, const std::vector<Vec>& tries, std::size_t j,
                 const std::vector<Vec>& aux, const LogTarget& target, const Proposal& q) {
  if (aux.size() + 1 != tries.size()) throw Error("mtm_alpha: need N-1 auxiliary points");
  const std::vector<double> lw = try_log_weights(tries, &state, target, q);
  std::vector<double> lv = try_log_weights(aux, &tries[j], target, q);
  lv.push_back(log_weight(state, &tries[j], target, q));
  return ratio_alpha(log_sum_exp(lw), log_sum_exp(lv));
}

MultiTryResult mtm_step(const Vec& state, const LogTarget& target, const Proposal& q,
                        std::size_t N, RandomStream& rng) {
  if (N < 1) throw Error("mtm: N must be at least 1");
  const std::vector<Vec> tries = draw_tries(&state, q, N, rng);
  const std::vector<double> lw = try_log_weights(tries, &state, target, q);
  MultiTryResult r;
  r.state = state;
  if (all_neg_inf(lw)) {
    r.degenerate = true;
    rng.uniform();
    return r;
  }
  r.selected = rng.categorical_log(lw);
  const Vec& chosen = tries[r.selected];
  std::vector<Vec> aux;
  if (N > 1) aux = draw_tries(&chosen, q, N - 1, rng);
  std::vector<double> lv = try_log_weights(aux, &chosen, target, q);
  lv.push_back(log_weight(state, &chosen, target, q));
  r.alpha = ratio_alpha(log_sum_exp(lw), log_sum_exp(lv));
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = chosen;
    r.accepted = true;
  }
  return r;
}

double imtm_alpha(const Vec& state, const std::vector<Vec>& tries, std::size_t j,
                  const LogTarget& target, const Proposal& q) {
  std::vector<double> lw = try_log_weights(tries, nullptr, target, q);
  const double l1 = log_sum_exp(lw);
  lw[j] = log_weight(state, nullptr, target, q);
  return ratio_alpha(l1, log_sum_exp(lw));
}

MultiTryResult imtm_step(const Vec& state, const LogTarget& target, const Proposal& q,
                         std::size_t N, RandomStream& rng) {
  if (N < 1) throw Error("imtm: N must be at least 1");
  const std::vector<Vec> tries = draw_tries(nullptr, q, N, rng);
  std::vector<double> lw = try_log_weights(tries, nullptr, target, q);
  MultiTryResult r;
  r.state = state;
  if (all_neg_inf(lw)) {
    r.degenerate = true;
    rng.uniform();
    return r;
  }
  r.selected = rng.categorical_log(lw);
  const double l1 = log_sum_exp(lw);
  lw[r.selected] = log_weight(state, nullptr, target, q);
  r.alpha = ratio_alpha(l1, log_sum_exp(lw));
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = tries[r.selected];
    r.accepted = true;
  }
  return r;
}

WeightedCandidateSet draw_candidate_set(const LogTarget& target, const Proposal& q, std::size_t N,
                                        RandomStream& rng) {
  if (N < 1) throw Error("candidate set: N must be at least 1");
  std::vector<Vec> tries = draw_tries(nullptr, q, N, rng);
  WeightedCandidateSet s;
  for (auto& y : tries) {
    const double lw = log_weight(y, nullptr, target, q);
    s.add(std::move(y), lw);
  }
  return s;
}

Imtm2Result imtm2_step(const Vec& state, double log_z_prev, const LogTarget& target,
                       const Proposal& q, std::size_t N, RandomStream& rng) {
  if (!std::isfinite(log_z_prev)) throw Error("invalid carried normalizer");
  WeightedCandidateSet s = draw_candidate_set(target, q, N, rng);
  Imtm2Result r;
  r.try_log_weights = s.log_weights();
  r.state = state;
  r.log_z = log_z_prev;
  if (all_neg_inf(r.try_log_weights)) {
    rng.uniform();
    return r;
  }
  const std::size_t j = rng.categorical_log(r.try_log_weights);
  const double lz = s.log_z_hat();
  r.alpha = ratio_alpha(lz, log_z_prev);
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = s[j].point;
    r.log_z = lz;
    r.accepted = true;
  }
  return r;
}

GmsResult gms_step(const WeightedCandidateSet& set_prev, double log_z_prev,
                   const LogTarget& target, const Proposal& q, std::size_t N, RandomStream& rng) {
  if (!std::isfinite(log_z_prev)) throw Error("invalid carried normalizer");
  WeightedCandidateSet s = draw_candidate_set(target, q, N, rng);
  GmsResult r;
  const double lz = s.log_z_hat();
  r.alpha = lz == kNegInf ? 0.0 : ratio_alpha(lz, log_z_prev);
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.set = std::move(s);
    r.log_z = lz;
    r.accepted = true;
  } else {
    r.set = set_prev;
    r.log_z = log_z_prev;
  }
  return r;
}

double gms_estimate(const std::vector<WeightedCandidateSet>& sets,
                    const std::function<double(const Vec&)>& g) {
  if (sets.empty()) throw Error("no samples");
  double total = 0.0;
  for (const auto& s : sets) {
    const std::vector<double> w = s.normalized_weights();
    double acc = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n)
      if (w[n] > 0.0) acc += w[n] * g(s[n].point);
    total += acc;
  }
  return total / static_cast<double>(sets.size());
}

std::vector<Vec> gms_recover_chain(const std::vector<WeightedCandidateSet>& sets,
                                   const std::vector<char>& accepted, const Vec& initial,
                                   RandomStream& rng) {
  if (sets.size() != accepted.size()) throw Error("gms_recover_chain: size mismatch");
  std::vector<Vec> chain;
  chain.reserve(sets.size());
  Vec cur = initial;
  for (std::size_t t = 0; t < sets.size(); ++t) {
    if (accepted[t]) cur = sets[t][rng.categorical_log(sets[t].log_weights())].point;
    chain.push_back(cur);
  }
  return chain;
}

std::vector<double> ensemble_probabilities(const Vec& state, const std::vector<Vec>& tries,
                                           const LogTarget& target, const Proposal& q) {
  std::vector<double> lw = try_log_weights(tries, nullptr, target, q);
  lw.push_back(log_weight(state, nullptr, target, q));
  const double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw Error("degenerate weights");
  std::vector<double> p(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) p[i] = std::exp(lw[i] - lse);
  return p;
}

MultiTryResult ensemble_step(const Vec& state, const LogTarget& target, const Proposal& q,
                             std::size_t N, RandomStream& rng) {
  if (N < 1) throw Error("ensemble: N must be at least 1");
  const std::vector<Vec> tries = draw_tries(nullptr, q, N, rng);
  std::vector<double> lw = try_log_weights(tries, nullptr, target, q);
  lw.push_back(log_weight(state, nullptr, target, q));
  if (all_neg_inf(lw)) throw Error("degenerate weights");
  MultiTryResult r;
  r.selected = rng.categorical_log(lw);
  const double lse = log_sum_exp(lw);
  r.alpha = 1.0 - std::exp(lw.back() - lse);  // probability of leaving the state
  if (r.selected < N) {
    r.state = tries[r.selected];
    r.accepted = true;
  } else {
    r.state = state;
  }
  return r;
}

double drm_alpha1(const Vec& x, const Vec& y1, const LogTarget& target, const Proposal& q1) {
  return mh_alpha(x, target.log_density(x), y1, target.log_density(y1), q1);
}

double drm_alpha2(const Vec& x, const Vec& y1, const Vec& y2, const LogTarget& target,
                  const Proposal& q1, const DelayedProposal& q2, bool* forced) {
  const double a_fwd = drm_alpha1(x, y1, target, q1);
  const double a_rev = drm_alpha1(y2, y1, target, q1);
  const double num = target.log_density(y2) + q1.log_q(y1, y2) + q2.log_density(x, y2, y1) +
                     std::log1p(-a_rev);
  const double den = target.log_density(x) + q1.log_q(y1, x) + q2.log_density(y2, x, y1) +
                     std::log1p(-a_fwd);
  if (forced) *forced = den == kNegInf && num != kNegInf;
  return ratio_alpha(num, den);
}

DrmResult drm_step(const Vec& state, const LogTarget& target, const Proposal& q1,
                   const DelayedProposal& q2, RandomStream& rng) {
  DrmResult r;
  r.state = state;
  const Vec y1 = q1.draw(rng, state);
  r.alpha1 = drm_alpha1(state, y1, target, q1);
  if (rng.uniform() <= r.alpha1 && r.alpha1 > 0.0) {
    r.state = y1;
    r.stage = DrmStage::first;
    return r;
  }
  const Vec y2 = q2.sample(rng, state, y1);
  r.alpha2 = drm_alpha2(state, y1, y2, target, q1, q2, &r.forced);
  if (rng.uniform() <= r.alpha2 && r.alpha2 > 0.0) {
    r.state = y2;
    r.stage = DrmStage::second;
  }
  return r;
}

}  // namespace mc
