#include "mc/gradient.hpp"

#include <cmath>

#include "mc/dist.hpp"

namespace mc {

namespace {

Vec checked_grad(const LogTarget& target, const Vec& x) {
  if (!target.has_grad()) throw Error("target has no gradient");
  Vec g = target.grad_log(x);
  if (!g.allFinite()) throw NumericalError("non-finite gradient");
  return g;
}

}  // namespace

GaussianParams mala_proposal(const Vec& state, const LogTarget& target, double dtau) {
  if (!(dtau > 0.0)) throw Error("mala: dtau must be positive");
  const Vec g = checked_grad(target, state);
  return {state + 0.5 * dtau * g, Mat::Identity(state.size(), state.size()) * dtau};
}

MhResult mala_step(const Vec& state, const LogTarget& target, double dtau, RandomStream& rng) {
  const GaussianParams fwd = mala_proposal(state, target, dtau);
  const double sd = std::sqrt(dtau);
  Vec cand = fwd.mean + sd * rng.normal_vector(static_cast<int>(state.size()));
  const double lp_x = target.log_density(state), lp_y = target.log_density(cand);
  MhResult r;
  if (lp_y == kNegInf) {
    r.alpha = 0.0;
  } else {
    const GaussianParams bwd = mala_proposal(cand, target, dtau);
    // log q(y|x) and log q(x|y) share the normalizer.
    const double lq_fwd = -0.5 * (cand - fwd.mean).squaredNorm() / dtau;
    const double lq_bwd = -0.5 * (state - bwd.mean).squaredNorm() / dtau;
    const double lr = lp_y + lq_bwd - lp_x - lq_fwd;
    r.alpha = lp_x == kNegInf ? 1.0 : std::min(1.0, std::exp(lr));
  }
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = std::move(cand);
    r.log_density = lp_y;
    r.accepted = true;
  } else {
    r.state = state;
    r.log_density = lp_x;
  }
  return r;
}

PhasePoint leapfrog(const PhasePoint& start, const GradFn& grad_log, double dtau, int L) {
  if (L < 1) throw Error("leapfrog: L must be at least 1");
  PhasePoint pp = start;
  for (int l = 0; l < L; ++l) {
    pp.p += 0.5 * dtau * grad_log(pp.theta);
    pp.theta += dtau * pp.p;
    pp.p += 0.5 * dtau * grad_log(pp.theta);
  }
  if (!pp.theta.allFinite() || !pp.p.allFinite()) throw NumericalError("leapfrog: non-finite state");
  return pp;
}

double hamiltonian(const PhasePoint& pp, const LogTarget& target) {
  return -target.log_density(pp.theta) + 0.5 * pp.p.squaredNorm();
}

MhResult hmc_step(const Vec& state, const LogTarget& target, double dtau, int L,
                  RandomStream& rng) {
  if (!target.has_grad()) throw Error("target has no gradient");
  PhasePoint start{state, rng.normal_vector(static_cast<int>(state.size()))};
  PhasePoint end = leapfrog(start, target.grad_log, dtau, L);
  end.p = -end.p;
  const double h0 = hamiltonian(start, target), h1 = hamiltonian(end, target);
  MhResult r;
  if (std::isnan(h0) || std::isnan(h1) || h0 == kInf) throw NumericalError("hmc: non-finite H");
  r.alpha = h1 == kInf ? 0.0 : std::min(1.0, std::exp(h0 - h1));
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = std::move(end.theta);
    r.log_density = -h1 + 0.5 * end.p.squaredNorm();
    r.accepted = true;
  } else {
    r.state = state;
    r.log_density = -h0 + 0.5 * start.p.squaredNorm();
  }
  return r;
}

GaussianParams hmc_one_step_proposal(const Vec& state, const LogTarget& target, double dtau) {
  if (!target.has_grad()) throw Error("target has no gradient");
  const auto D = state.size();
  const Vec mean = leapfrog({state, Vec::Zero(D)}, target.grad_log, dtau, 1).theta;
  Mat J(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    J.col(i) = leapfrog({state, Vec::Unit(D, i)}, target.grad_log, dtau, 1).theta - mean;
  return {mean, J * J.transpose()};
}

Vec finite_difference_grad(const LogTarget& target, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (target.log_density(a) - target.log_density(b)) / (2.0 * h);
  }
  return g;
}

WarmupResult warmup_step_size(GradientSampler kind, const Vec& init, const LogTarget& target,
                              double dtau0, int L, double target_ar, int iterations,
                              RandomStream& rng) {
  if (!(dtau0 > 0.0) || iterations < 1) throw Error("warmup: invalid settings");
  double log_dt = std::log(dtau0);
  Vec x = init;
  double acc_sum = 0.0;
  int acc_n = 0;
  for (int t = 1; t <= iterations; ++t) {
    const double dt = std::exp(log_dt);
    MhResult r = kind == GradientSampler::mala ? mala_step(x, target, dt, rng)
                                               : hmc_step(x, target, dt, L, rng);
    x = r.state;
    log_dt += std::pow(static_cast<double>(t), -0.6) * (r.alpha - target_ar);
    if (2 * t > iterations) {
      acc_sum += r.alpha;
      ++acc_n;
    }
  }
  return {std::exp(log_dt), x, acc_n ? acc_sum / acc_n : 0.0};
}

}  // namespace mc
