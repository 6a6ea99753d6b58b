#include "mc/pmcmc.hpp"

#include <cmath>

namespace mc {

namespace {

double accept_prob(double log_ratio) {
  if (std::isnan(log_ratio)) throw NumericalError("NaN in acceptance ratio");
  if (log_ratio == kNegInf) return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

struct FilterDraw {
  Vec x;
  double log_z;
};

FilterDraw filter_and_pick(const SequentialModel& model, std::size_t N, const PmhOptions& opt,
                           RandomStream& rng) {
  SirResult f = sir_run(model, N, opt.sir, rng);
  const std::size_t k = rng.categorical_log(f.system.log_w);
  return {flatten(f.system.paths[k]), opt.use_z_hat ? f.log_z_hat : f.log_z_tilde};
}

}  // namespace

PmhResult pmh_step(const Vec& x_prev, double log_z_prev, const SequentialModel& model,
                   std::size_t N, const PmhOptions& opt, RandomStream& rng) {
  if (!std::isfinite(log_z_prev)) throw Error("invalid carried normalizer");
  FilterDraw d = filter_and_pick(model, N, opt, rng);
  PmhResult r;
  r.alpha = accept_prob(d.log_z - log_z_prev);
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.x = std::move(d.x);
    r.log_z = d.log_z;
    r.accepted = true;
  } else {
    r.x = x_prev;
    r.log_z = log_z_prev;
  }
  return r;
}

double pmmh_log_ratio(const Vec& lambda_prev, double log_z_prev, const Vec& lambda_new,
                      double log_z_new, const std::function<double(const Vec&)>& log_prior,
                      const Proposal& q_lambda) {
  const double gn = log_prior(lambda_new);
  if (gn == kNegInf || log_z_new == kNegInf) return kNegInf;
  double num = log_z_new + gn, den = log_z_prev + log_prior(lambda_prev);
  if (!q_lambda.symmetric) {
    num += q_lambda.log_q(lambda_prev, lambda_new);
    den += q_lambda.log_q(lambda_new, lambda_prev);
  }
  if (den == kNegInf) return kInf;
  return num - den;
}

PmmhResult pmmh_step(const Vec& lambda_prev, const Vec& x_prev, double log_z_prev,
                     const ModelFamily& model, const std::function<double(const Vec&)>& log_prior,
                     const Proposal& q_lambda, std::size_t N, const PmhOptions& opt,
                     RandomStream& rng) {
  if (!std::isfinite(log_z_prev)) throw Error("invalid carried normalizer");
  PmmhResult r;
  r.lambda = lambda_prev;
  r.x = x_prev;
  r.log_z = log_z_prev;
  const Vec cand = q_lambda.draw(rng, lambda_prev);
  if (log_prior(cand) == kNegInf) {
    rng.uniform();
    return r;
  }
  FilterDraw d = filter_and_pick(model(cand), N, opt, rng);
  r.alpha = accept_prob(pmmh_log_ratio(lambda_prev, log_z_prev, cand, d.log_z, log_prior, q_lambda));
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.lambda = cand;
    r.x = std::move(d.x);
    r.log_z = d.log_z;
    r.accepted = true;
  }
  return r;
}

PgResult pg_step(const Vec& lambda_prev, const Path& x_prev, const ModelFamily& model,
                 const LambdaSampler& sample_lambda, std::size_t N, RandomStream& rng) {
  ParticleSystem sys = cpf_run(model(lambda_prev), x_prev, N, rng);
  const std::size_t k = rng.categorical_log(sys.log_w);
  PgResult r;
  r.x = sys.paths[k];
  r.lambda = sample_lambda(r.x, rng);
  if (!r.lambda.allFinite()) throw NumericalError("pg: lambda sampler returned non-finite values");
  return r;
}

}  // namespace mc
