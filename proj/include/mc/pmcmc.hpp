#pragma once

#include <functional>

#include "mc/core.hpp"
#include "mc/smc.hpp"

namespace mc {

struct PmhOptions {
  SirOptions sir;
  // Accept on the proper-weighting estimate Z_hat instead of Z_tilde.
  bool use_z_hat = false;
};

struct PmhResult {
  Vec x;           // flattened path
  double log_z;    // carried log normalizer estimate
  bool accepted = false;
  double alpha = 0.0;
};

// log_z_prev must be finite.
PmhResult pmh_step(const Vec& x_prev, double log_z_prev, const SequentialModel& model,
                   std::size_t N, const PmhOptions& opt, RandomStream& rng);

using ModelFamily = std::function<SequentialModel(const Vec& lambda)>;

struct PmmhResult {
  Vec lambda;
  Vec x;
  double log_z;
  bool accepted = false;
  double alpha = 0.0;
};

// log of Z(l*) g(l*) q(l_prev | l*) / (Z(l_prev) g(l_prev) q(l* | l_prev)).
double pmmh_log_ratio(const Vec& lambda_prev, double log_z_prev, const Vec& lambda_new,
                      double log_z_new, const std::function<double(const Vec&)>& log_prior,
                      const Proposal& q_lambda);

PmmhResult pmmh_step(const Vec& lambda_prev, const Vec& x_prev, double log_z_prev,
                     const ModelFamily& model, const std::function<double(const Vec&)>& log_prior,
                     const Proposal& q_lambda, std::size_t N, const PmhOptions& opt,
                     RandomStream& rng);

// Exact draw of lambda given a path.
using LambdaSampler = std::function<Vec(const Path& x, RandomStream& rng)>;

struct PgResult {
  Vec lambda;
  Path x;
};

PgResult pg_step(const Vec& lambda_prev, const Path& x_prev, const ModelFamily& model,
                 const LambdaSampler& sample_lambda, std::size_t N, RandomStream& rng);

}  // namespace mc
