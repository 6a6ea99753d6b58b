#include "mc/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mc {

namespace {

double alpha_from_logs(double num, double den) {
  if (std::isnan(num) || std::isnan(den)) throw NumericalError("NaN in acceptance ratio");
  if (num == kNegInf) return 0.0;
  if (den == kNegInf) return 1.0;
  return std::min(1.0, std::exp(num - den));
}

bool accept(RandomStream& rng, double alpha) {
  const double u = rng.uniform();
  return u <= alpha && alpha > 0.0;
}

}  // namespace

double pseudo_marginal_alpha(double log_prior_prev, double log_est_prev, double log_prior_new,
                             double log_est_new, double log_q_fwd, double log_q_bwd) {
  return alpha_from_logs(log_prior_new + log_est_new + log_q_bwd,
                         log_prior_prev + log_est_prev + log_q_fwd);
}

PseudoMarginalResult pseudo_marginal_step(const Vec& state, double log_est_prev,
                                          const LogPrior& log_prior,
                                          const LikelihoodEstimator& lik, const Proposal& q,
                                          PseudoMarginal variant, RandomStream& rng) {
  const Vec cand = q.draw(rng, state);
  const double le_new = lik.log_estimate(cand, rng);
  double le_prev = log_est_prev;
  if (variant == PseudoMarginal::mcwm) le_prev = lik.log_estimate(state, rng);
  if (std::isnan(le_new) || std::isnan(le_prev) || le_new == kInf || le_prev == kInf)
    throw NumericalError("likelihood estimate not finite");
  PseudoMarginalResult r;
  r.forced_reject = le_new == kNegInf && le_prev == kNegInf;
  const double lq_fwd = q.symmetric ? 0.0 : q.log_q(cand, state);
  const double lq_bwd = q.symmetric ? 0.0 : q.log_q(state, cand);
  r.alpha = r.forced_reject ? 0.0
                            : pseudo_marginal_alpha(log_prior(state), le_prev, log_prior(cand),
                                                    le_new, lq_fwd, lq_bwd);
  if (accept(rng, r.alpha)) {
    r.state = cand;
    r.log_est = le_new;
    r.accepted = true;
  } else {
    r.state = state;
    r.log_est = le_prev;
  }
  return r;
}

double sve_alpha(const Vec& theta, const Vec& y_prev, const Vec& theta_new, const Vec& y_new,
                 const Vec& y_true, const SveModel& m, const Proposal& q) {
  const double phi_new_aux = m.log_phi(y_new, theta_new);
  if (phi_new_aux == kNegInf) return 0.0;
  double num = m.log_phi(y_true, theta_new) + m.log_prior(theta_new) + m.log_phi(y_prev, theta);
  double den = m.log_phi(y_true, theta) + m.log_prior(theta) + phi_new_aux;
  if (!q.symmetric) {
    num += q.log_q(theta, theta_new);
    den += q.log_q(theta_new, theta);
  }
  return alpha_from_logs(num, den);
}

SveResult sve_step(const Vec& state, const Vec& y_prev, const Vec& y_true, const SveModel& model,
                   const Proposal& q, RandomStream& rng) {
  const Vec cand = q.draw(rng, state);
  const Vec y_new = model.simulate(cand, rng);
  SveResult r;
  r.forced_reject = model.log_phi(y_new, cand) == kNegInf;
  r.alpha = sve_alpha(state, y_prev, cand, y_new, y_true, model, q);
  if (accept(rng, r.alpha)) {
    r.state = cand;
    r.y = y_new;
    r.accepted = true;
  } else {
    r.state = state;
    r.y = y_prev;
  }
  return r;
}

double AbcKernel::distance(const Vec& a, const Vec& b) const {
  if (summary) return (summary(a) - summary(b)).norm();
  return (a - b).norm();
}

double AbcKernel::log_h(double dist) const {
  if (kind == AbcKernelKind::indicator) return dist <= eps ? 0.0 : kNegInf;
  return -0.5 * dist * dist / (eps * eps);
}

AbcResult abc_mh_step(const Vec& state, const Vec& y_prev, const Vec& y_true,
                      const LogPrior& log_prior, const Proposal& q, const Simulator& simulate,
                      const AbcKernel& kernel, RandomStream& rng) {
  if (!(kernel.eps > 0.0)) throw Error("abc: tolerance must be positive");
  const Vec cand = q.draw(rng, state);
  Vec y_new;
  try {
    y_new = simulate(cand, rng);
  } catch (const std::exception& e) {
    throw Error(std::string("abc: simulator failure: ") + e.what());
  }
  if (!y_new.allFinite()) throw Error("abc: simulator failure: non-finite data");
  AbcResult r;
  r.distance = kernel.distance(y_new, y_true);
  double num = log_prior(cand), den = log_prior(state);
  if (!q.symmetric) {
    num += q.log_q(state, cand);
    den += q.log_q(cand, state);
  }
  if (kernel.kind == AbcKernelKind::indicator) {
    r.alpha = r.distance > kernel.eps ? 0.0 : alpha_from_logs(num, den);
  } else {
    num += kernel.log_h(r.distance);
    den += kernel.log_h(kernel.distance(y_prev, y_true));
    r.alpha = alpha_from_logs(num, den);
  }
  if (accept(rng, r.alpha)) {
    r.state = cand;
    r.y = std::move(y_new);
    r.accepted = true;
  } else {
    r.state = state;
    r.y = y_prev;
  }
  return r;
}

NoisyResult noisy_mh_step(const Vec& state, const Proposal& q, const RatioEstimator& rho_hat,
                          RandomStream& rng) {
  const Vec cand = q.draw(rng, state);
  double rho = rho_hat(state, cand, rng);
  if (std::isnan(rho) || rho == kInf) throw NumericalError("noisy_mh: ratio estimate not finite");
  rho = std::max(rho, 0.0);
  NoisyResult r;
  r.alpha = std::min(1.0, rho);
  if (accept(rng, r.alpha)) {
    r.state = cand;
    r.accepted = true;
  } else {
    r.state = state;
  }
  return r;
}

RatioEstimator exact_ratio(const LogTarget& target, const Proposal& q) {
  return [target, q](const Vec& prev, const Vec& cand, RandomStream&) {
    double num = target.log_density(cand), den = target.log_density(prev);
    if (!q.symmetric) {
      num += q.log_q(prev, cand);
      den += q.log_q(cand, prev);
    }
    if (num == kNegInf) return 0.0;
    if (den == kNegInf) return std::numeric_limits<double>::max();
    return std::exp(num - den);
  };
}

}  // namespace mc
