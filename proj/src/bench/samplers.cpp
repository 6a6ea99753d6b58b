#include "mc/bench/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "mc/adaptive.hpp"
#include "mc/ais.hpp"
#include "mc/bench/targets.hpp"
#include "mc/diagnostics.hpp"
#include "mc/dist.hpp"
#include "mc/mcmc.hpp"
#include "mc/multitry.hpp"

namespace mc::bench {

namespace {

std::size_t size_param(const Params& p, const std::string& key, std::optional<long> budget,
                       std::size_t def) {
  const long v = p.integer(key, budget.value_or(static_cast<long>(def)));
  if (v < 0) throw ConfigError("'" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

Vec uniform_vec(RandomStream& rng, int dim, double lo, double hi) {
  Vec v(dim);
  for (int d = 0; d < dim; ++d) v[d] = rng.uniform(lo, hi);
  return v;
}

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
  if (to <= from) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += v[i];
  return s / (to - from);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"gm1d", "gm2d5", "logistic_map", "wsn", "spectral"};
  return names;
}

std::vector<std::string> sampler_names(const std::string& e) {
  if (e == "gm1d") return {"agm_mh", "am", "rwmh"};
  if (e == "gm2d5") return {"pmc", "lr_pmc", "gr_pmc", "amis"};
  if (e == "logistic_map") return {"fuss_gibbs", "mh_gibbs"};
  if (e == "wsn") return {"gms", "mh_parallel"};
  if (e == "spectral") return {"omcmc_approx", "ipc"};
  return {};
}

std::string describe_experiment(const std::string& e) {
  if (e == "gm1d")
    return "1-D equal-weight mixture of N(eta_i, 4), M in {2,3,6} modes (params.modes). "
           "Estimates the mean (truth 0) with T iterations; AGM-MH adapts after T_train.";
  if (e == "gm2d5")
    return "2-D mixture of five Gaussians, mean [1.6, 1.4], Z = 1. Population and adaptive "
           "importance samplers at a total budget L = K N T (params.L, params.sigma).";
  if (e == "logistic_map")
    return "Noisy logistic map, R = 3.7, Omega = 0.4, T = 20, known lambda (params.lambda). "
           "Gibbs sampling of (R, Omega) with FUSS or random-walk MH conditionals; MSE is taken "
           "against the posterior mean computed by quadrature for each generated data set.";
  if (e == "wsn")
    return "Range-based localization with 6 sensors and unknown per-sensor noise, theta in R^8; "
           "MSE against the ground truth parameters for E = N T posterior evaluations.";
  if (e == "spectral")
    return "Frequencies of two unit sinusoids from L = 10 noisy samples, truth (0.1, 0.3). "
           "Relative error ||f_hat - f|| / ||f|| of the sorted posterior mean. omcmc_approx is an "
           "approximation of O-MCMC: parallel MH chains plus one population-proposal exchange "
           "move per epoch.";
  throw ConfigError("unknown experiment '" + e + "'");
}

// ---- gm1d -----------------------------------------------------------------

Gm1dSettings gm1d_settings(const Params& p, const Budget& b) {
  Gm1dSettings s;
  s.modes = static_cast<int>(p.integer("modes", s.modes));
  s.T = size_param(p, "T", b.T, s.T);
  s.T_train = size_param(p, "T_train", std::nullopt, s.T_train);
  s.sigma0_sq = p.num("sigma0_sq", s.sigma0_sq);
  s.rw_sigma = p.num("rw_sigma", s.rw_sigma);
  s.track_alpha = p.integer("track_alpha", 0) != 0;
  s.am_lambda0 = p.num("am_lambda0", s.am_lambda0);
  s.am_adapt_scale = p.integer("am_adapt_scale", s.am_adapt_scale) != 0;
  if (s.T < 2) throw ConfigError("gm1d: T must be at least 2");
  if (s.modes != 2 && s.modes != 3 && s.modes != 6) throw ConfigError("gm1d: modes must be 2, 3 or 6");
  return s;
}

Outcome run_gm1d(const std::string& sampler, const Gm1dSettings& s, RandomStream& rng) {
  const LogTarget target = target_gm1d(s.modes);
  Vec state = Vec::Constant(1, rng.normal());
  double lp = target(state);
  std::vector<double> trace, alpha;
  trace.reserve(s.T);
  alpha.reserve(s.T);
  std::size_t acc = 0;

  auto record = [&](const MhResult& r) {
    state = r.state;
    lp = r.log_density;
    trace.push_back(state[0]);
    alpha.push_back(r.alpha);
    acc += r.accepted;
  };

  if (sampler == "agm_mh") {
    std::vector<Vec> means, vars;
    for (std::size_t n = 0; n < gm1d_means(s.modes).size(); ++n) {
      means.push_back(Vec::Constant(1, rng.uniform(-20.0, 20.0)));
      vars.push_back(Vec::Constant(1, s.sigma0_sq));
    }
    MixtureProposal mix = make_mixture(means, vars);
    for (std::size_t t = 1; t <= s.T; ++t) record(agm_mh_step(state, lp, mix, target, t, s.T_train, rng));
  } else if (sampler == "am") {
    AdaptiveState a = am_init(state, Mat::Constant(1, 1, s.sigma0_sq), s.am_lambda0);
    a.adapt_cov = false;
    if (!s.am_adapt_scale) a.gain = [](std::size_t) { return 0.0; };
    for (std::size_t t = 1; t <= s.T; ++t) {
      if (t == s.T_train + 1) {
        a.adapt_cov = true;
        a.cov_est = am_covariance(a);
      }
      record(am_step(state, lp, a, target, t, rng));
    }
  } else if (sampler == "rwmh") {
    const Proposal q = gaussian_random_walk(1, s.rw_sigma);
    for (std::size_t t = 1; t <= s.T; ++t) record(mh_step(state, lp, target, q, rng));
  } else {
    throw ConfigError("gm1d: unknown sampler '" + sampler + "'");
  }

  Outcome o;
  o.estimate = Vec::Constant(1, mean_of(trace, 0, trace.size()));
  o.truth = Vec::Zero(1);
  o.evaluations = s.T + 1;
  o.metrics["lag1"] = autocorrelation(trace, 1);
  o.metrics["acceptance_rate"] = static_cast<double>(acc) / s.T;
  const std::size_t split = std::min(s.T_train, s.T);
  o.metrics["alpha_pre_train"] = mean_of(alpha, 0, split);
  o.metrics["alpha_post_train"] = mean_of(alpha, split, alpha.size());
  if (s.track_alpha) o.alpha = std::move(alpha);
  return o;
}

// ---- gm2d5 ----------------------------------------------------------------

Gm2dSettings gm2d_settings(const std::string& sampler, const Params& p, const Budget& b) {
  Gm2dSettings s;
  if (sampler == "amis") s.N = 1, s.K = 2000;
  if (sampler == "lr_pmc" || sampler == "gr_pmc") s.K = 5;
  s.N = size_param(p, "N", b.N, s.N);
  s.K = size_param(p, "K", b.K, s.K);
  s.L = size_param(p, "L", std::nullopt, s.L);
  s.T = size_param(p, "T", b.T, 0);
  s.sigma = p.num("sigma", s.sigma);
  s.init_half_width = p.num("init_half_width", s.init_half_width);
  if (s.N < 1 || s.K < 1) throw ConfigError("gm2d5: N and K must be positive");
  if (s.T == 0) s.T = s.L / (s.K * s.N);
  if (s.T < 1) throw ConfigError("gm2d5: budget too small for K N");
  if (!(s.sigma > 0.0)) throw ConfigError("gm2d5: sigma must be positive");
  return s;
}

Outcome run_gm2d5(const std::string& sampler, const Gm2dSettings& s, RandomStream& rng) {
  const LogTarget target = target_gm2d5();
  Denominator den;
  Adaptation rule;
  if (sampler == "pmc") den = Denominator::own, rule = Adaptation::resample_global;
  else if (sampler == "lr_pmc") den = Denominator::spatial_mixture, rule = Adaptation::resample_local;
  else if (sampler == "gr_pmc") den = Denominator::spatial_mixture, rule = Adaptation::resample_global;
  else if (sampler == "amis") den = Denominator::temporal_mixture, rule = Adaptation::moment_fit;
  else throw ConfigError("gm2d5: unknown sampler '" + sampler + "'");

  std::vector<Vec> means;
  for (std::size_t n = 0; n < s.N; ++n)
    means.push_back(uniform_vec(rng, 2, -s.init_half_width, s.init_half_width));
  ProposalPopulation pop = make_population(means, Mat::Identity(2, 2) * s.sigma * s.sigma, den, rule);

  std::vector<ParticleSet> pool;
  std::vector<Vec> points;
  std::vector<double> log_target;
  for (std::size_t t = 0; t < s.T; ++t) {
    AisIteration it = ais_iteration(pop, target, s.K, rng);
    if (sampler == "amis") {
      for (const auto& w : it.samples.samples()) points.push_back(w.point);
      log_target.insert(log_target.end(), it.log_target.begin(), it.log_target.end());
    }
    pool.push_back(std::move(it.samples));
  }
  if (sampler == "amis") {
    pool.clear();
    pool.push_back(amis_reweight(pop.mean_history, pop.scales, points, log_target));
  }
  const AisEstimate est = ais_estimate(pool);
  Outcome o;
  o.estimate = est.mean;
  o.truth = gm2d5_mean();
  o.log_z = est.log_z;
  o.evaluations = s.N * s.K * s.T;
  o.metrics["z_hat"] = std::exp(est.log_z);
  return o;
}

// ---- logistic map ---------------------------------------------------------

LogisticSettings logistic_settings(const Params& p, const Budget& b) {
  LogisticSettings s;
  s.lambda = p.num("lambda", s.lambda);
  s.R = p.num("R", s.R);
  s.Omega = p.num("Omega", s.Omega);
  s.T_obs = static_cast<int>(p.integer("T_obs", s.T_obs));
  s.N_G = size_param(p, "N_G", b.T, s.N_G);
  s.delta = p.num("delta", s.delta);
  s.K_keep = size_param(p, "K_keep", b.K, s.K_keep);
  s.grid_lo = p.num("grid_lo", s.grid_lo);
  s.grid_hi = p.num("grid_hi", s.grid_hi);
  s.grid_step = p.num("grid_step", s.grid_step);
  s.T_MH = static_cast<int>(p.integer("T_MH", s.T_MH));
  s.sigma_p = p.num("sigma_p", s.sigma_p);
  if (!(s.lambda > 0.0)) throw ConfigError("logistic_map: lambda must be positive");
  if (s.N_G < 1 || s.T_MH < 1) throw ConfigError("logistic_map: N_G and T_MH must be positive");
  if (!(s.grid_step > 0.0) || !(s.grid_hi > s.grid_lo)) throw ConfigError("logistic_map: bad grid");
  return s;
}

Outcome run_logistic(const std::string& sampler, const LogisticSettings& s, RandomStream& rng) {
  const Vec z = logistic_generate(s.R, s.Omega, s.lambda, s.T_obs, rng);
  LogisticPosterior post(z, s.lambda);
  // Omega starts above every observation so both conditionals have support.
  double R = rng.uniform(1.0, 5.0), Om = rng.uniform(std::max(0.38, 1.001 * post.max_z()), 1.5);
  Vec sum = Vec::Zero(2);
  std::size_t evals = 0;
  int acc = 0;

  if (sampler == "fuss_gibbs") {
    const auto n = static_cast<std::size_t>(std::llround((s.grid_hi - s.grid_lo) / s.grid_step)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = s.grid_lo + s.grid_step * static_cast<double>(i);
    post.tabulate_omega(grid);
    for (std::size_t g = 0; g < s.N_G; ++g) {
      const auto pR = fuss_build_from_values(grid, post.log_cond_R_on_grid(grid, Om), s.delta, s.K_keep);
      R = piecewise_mh(R, pR, [&](double x) { return post.log_cond_R(x, Om); }, s.T_MH, rng, &acc);
      const auto pO = fuss_build_from_values(grid, post.log_cond_Omega_on_grid(R), s.delta, s.K_keep);
      Om = piecewise_mh(Om, pO, [&](double x) { return post.log_cond_Omega(x, R); }, s.T_MH, rng, &acc);
      evals += 2 * (n + s.T_MH + 1);
      sum[0] += R;
      sum[1] += Om;
    }
  } else if (sampler == "mh_gibbs") {
    auto mh1 = [&](double x, const std::function<double(double)>& lt) {
      double lx = lt(x);
      for (int k = 0; k < s.T_MH; ++k) {
        const double y = x + s.sigma_p * rng.normal();
        const double ly = lt(y);
        double a;
        if (ly == kNegInf) a = 0.0;
        else if (lx == kNegInf) a = 1.0;
        else a = std::min(1.0, std::exp(ly - lx));
        if (rng.uniform() <= a && a > 0.0) x = y, lx = ly, ++acc;
      }
      return x;
    };
    for (std::size_t g = 0; g < s.N_G; ++g) {
      R = mh1(R, [&](double x) { return post.log_cond_R(x, Om); });
      Om = mh1(Om, [&](double x) { return post.log_cond_Omega(x, R); });
      evals += 2 * (s.T_MH + 1);
      sum[0] += R;
      sum[1] += Om;
    }
  } else {
    throw ConfigError("logistic_map: unknown sampler '" + sampler + "'");
  }

  Outcome o;
  o.estimate = sum / static_cast<double>(s.N_G);
  o.truth = post.posterior_mean(s.grid_hi);
  o.evaluations = evals;
  o.metrics["acceptance_rate"] = static_cast<double>(acc) / (2.0 * s.N_G * s.T_MH);
  return o;
}

// ---- wsn ------------------------------------------------------------------

WsnSettings wsn_settings(const Params& p, const Budget& b) {
  WsnSettings s;
  s.N = size_param(p, "N", b.N, s.N);
  s.E = size_param(p, "E", std::nullopt, s.E);
  s.sigma = p.num("sigma", s.sigma);
  s.train_fraction = p.num("train_fraction", s.train_fraction);
  s.data_seed = static_cast<std::uint64_t>(p.integer("data_seed", static_cast<long>(s.data_seed)));
  if (s.N < 1 || s.E < s.N) throw ConfigError("wsn: need 1 <= N <= E");
  if (b.T && static_cast<std::size_t>(*b.T) * s.N != s.E) throw ConfigError("wsn: N*T must equal E");
  return s;
}

Mat wsn_dataset(const WsnSettings& s) {
  RandomStream rng(s.data_seed);
  return wsn_generate(wsn_truth(), kWsnObservations, rng);
}

Outcome run_wsn(const std::string& sampler, const WsnSettings& s, const Mat& Y, RandomStream& rng) {
  const LogTarget target = target_wsn(Y);
  const int D = target.dim;
  const std::size_t T = s.E / s.N;
  Vec sum = Vec::Zero(D);
  std::size_t evals = 0;
  double acc = 0.0;

  if (sampler == "gms") {
    Vec mu = uniform_vec(rng, D, 1.0, 5.0);
    const Mat cov = Mat::Identity(D, D) * s.sigma * s.sigma;
    const auto train = static_cast<std::size_t>(std::ceil(s.train_fraction * T));
    auto set_mean = [](const WeightedCandidateSet& set) {
      const auto w = set.normalized_weights();
      Vec m = Vec::Zero(set[0].point.size());
      for (std::size_t n = 0; n < set.size(); ++n) m += w[n] * set[n].point;
      return m;
    };
    WeightedCandidateSet set;
    double lz = kNegInf;
    std::size_t t = 0;
    while (t < T) {
      const Proposal q = gaussian_independent(mu, cov);
      if (lz == kNegInf) {
        set = draw_candidate_set(target, q, s.N, rng);
        lz = set.log_z_hat();
        evals += s.N;
        ++t;
        if (lz == kNegInf) continue;  // no candidate inside the support yet
      } else {
        GmsResult r = gms_step(set, lz, target, q, s.N, rng);
        evals += s.N;
        ++t;
        acc += r.accepted;
        set = std::move(r.set);
        lz = r.log_z;
      }
      sum += set_mean(set);
      if (t >= train) mu = sum / static_cast<double>(t);
    }
    acc /= std::max<std::size_t>(T - 1, 1);
  } else if (sampler == "mh_parallel") {
    const Proposal q = gaussian_random_walk(D, s.sigma);
    auto streams = rng.split(s.N);
    for (std::size_t n = 0; n < s.N; ++n) {
      Vec x = uniform_vec(streams[n], D, 1.0, 5.0);
      double lp = target(x);
      sum += x;
      for (std::size_t t = 1; t < T; ++t) {
        MhResult r = mh_step(x, lp, target, q, streams[n]);
        x = r.state;
        lp = r.log_density;
        acc += r.accepted;
        sum += x;
      }
      evals += T;
    }
    acc /= static_cast<double>(s.N * std::max<std::size_t>(T - 1, 1));
  } else {
    throw ConfigError("wsn: unknown sampler '" + sampler + "'");
  }

  Outcome o;
  o.estimate = sum / static_cast<double>(sampler == "gms" ? T : T * s.N);
  o.truth = wsn_truth();
  o.evaluations = evals;
  o.metrics["acceptance_rate"] = acc;
  return o;
}

// ---- spectral -------------------------------------------------------------

SpectralSettings spectral_settings(const Params& p, const Budget& b) {
  SpectralSettings s;
  s.N = size_param(p, "N", b.N, s.N);
  s.E = size_param(p, "E", std::nullopt, s.E);
  s.sigma = p.num("sigma", s.sigma);
  s.sigma_w = p.num("sigma_w", s.sigma_w);
  s.L = static_cast<int>(p.integer("L", s.L));
  if (s.N < 2 || s.E < 2 * s.N) throw ConfigError("spectral: need N >= 2 and E >= 2N");
  return s;
}

Outcome run_spectral(const std::string& sampler, const SpectralSettings& s, RandomStream& rng) {
  const int D = static_cast<int>(s.f.size());
  const Vec y = spectral_generate(s.f, s.L, s.sigma_w, rng);
  const LogTarget target = target_spectral(y, s.sigma_w, D);
  const Proposal rw = gaussian_random_walk(D, s.sigma);

  std::vector<Vec> x(s.N);
  std::vector<double> lp(s.N);
  for (std::size_t n = 0; n < s.N; ++n) {
    x[n] = uniform_vec(rng, D, 0.0, 0.5);
    lp[n] = target(x[n]);
  }
  std::size_t evals = s.N, count = 0;
  Vec sum = Vec::Zero(D);
  auto accumulate = [&] {
    for (const auto& v : x) {
      Vec srt = v;
      std::sort(srt.data(), srt.data() + D);
      sum += srt;
      ++count;
    }
  };
  accumulate();
  double acc = 0.0, moves = 0.0, exchange_rate = 0.0;

  if (sampler == "ipc") {
    const std::size_t T = s.E / s.N;
    auto streams = rng.split(s.N);
    for (std::size_t t = 1; t < T; ++t) {
      for (std::size_t n = 0; n < s.N; ++n) {
        MhResult r = mh_step(x[n], lp[n], target, rw, streams[n]);
        x[n] = r.state, lp[n] = r.log_density;
        acc += r.accepted, moves += 1;
      }
      evals += s.N;
      accumulate();
    }
  } else if (sampler == "omcmc_approx") {
    const std::size_t epochs = (s.E - s.N) / (s.N + 1);
    const double sig2 = s.sigma * s.sigma;
    // Equal-weight mixture of N(x_j, sigma^2 I) over the chains other than n.
    auto pop_log_q = [&](const Vec& v, std::size_t n) {
      std::vector<double> l;
      for (std::size_t j = 0; j < s.N; ++j) {
        if (j == n) continue;
        l.push_back(-0.5 * ((v - x[j]).squaredNorm() / sig2) - 0.5 * D * std::log(sig2));
      }
      return log_sum_exp(l);
    };
    auto streams = rng.split(s.N);
    double hacc = 0.0;
    for (std::size_t e = 0; e < epochs; ++e) {
      for (std::size_t n = 0; n < s.N; ++n) {
        MhResult r = mh_step(x[n], lp[n], target, rw, streams[n]);
        x[n] = r.state, lp[n] = r.log_density;
        acc += r.accepted, moves += 1;
      }
      // Exchange move: chain n proposes from the population of the others,
      // which stays fixed during the move, so the joint target is preserved.
      const std::size_t n = rng.index(s.N);
      std::size_t j = rng.index(s.N - 1);
      if (j >= n) ++j;
      const Vec cand = x[j] + s.sigma * rng.normal_vector(D);
      const double lc = target(cand);
      const double num = lc + pop_log_q(x[n], n), den = lp[n] + pop_log_q(cand, n);
      double a = 0.0;
      if (lc > kNegInf) a = den == kNegInf ? 1.0 : std::min(1.0, std::exp(num - den));
      if (rng.uniform() <= a && a > 0.0) {
        x[n] = cand, lp[n] = lc;
        hacc += 1.0;
      }
      evals += s.N + 1;
      accumulate();
    }
    exchange_rate = epochs > 0 ? hacc / epochs : 0.0;
  } else {
    throw ConfigError("spectral: unknown sampler '" + sampler + "'");
  }

  Vec f = s.f;
  std::sort(f.data(), f.data() + D);
  Outcome o;
  o.estimate = sum / static_cast<double>(count);
  o.truth = f;
  o.evaluations = evals;
  o.metrics["relative_error"] = (o.estimate - f).norm() / f.norm();
  o.metrics["acceptance_rate"] = moves > 0 ? acc / moves : 0.0;
  if (sampler == "omcmc_approx") o.metrics["exchange_rate"] = exchange_rate;
  return o;
}

}  // namespace mc::bench
