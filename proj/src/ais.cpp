#include "mc/ais.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mc/is.hpp"
#include "mc/mcmc.hpp"

namespace mc {

ProposalPopulation make_population(const std::vector<Vec>& means, const Mat& scale,
                                   Denominator denominator, Adaptation rule) {
  if (means.empty()) throw Error("population: N must be at least 1");
  ProposalPopulation p;
  p.means = means;
  p.scales.assign(means.size(), scale);
  p.denominator = denominator;
  p.rule = rule;
  return p;
}

namespace {

std::vector<Gaussian> gaussians(const std::vector<Vec>& means, const std::vector<Mat>& scales) {
  std::vector<Gaussian> g;
  g.reserve(means.size());
  for (std::size_t n = 0; n < means.size(); ++n) g.emplace_back(means[n], scales[n]);
  return g;
}

double mixture_log_pdf(const std::vector<Gaussian>& gs, const Vec& x) {
  std::vector<double> l(gs.size());
  for (std::size_t j = 0; j < gs.size(); ++j) l[j] = gs[j].log_pdf(x);
  return log_sum_exp(l) - std::log(static_cast<double>(gs.size()));
}

Vec weighted_mean(const ParticleSet& ps, std::size_t begin, std::size_t end, bool* ok) {
  std::vector<double> lw;
  for (std::size_t i = begin; i < end; ++i) lw.push_back(ps[i].log_weight);
  const double lse = log_sum_exp(lw);
  *ok = lse != kNegInf && std::isfinite(lse);
  Vec m = Vec::Zero(ps[begin].point.size());
  if (!*ok) return m;
  for (std::size_t i = begin; i < end; ++i) {
    const double w = std::exp(lw[i - begin] - lse);
    if (w > 0.0) m += w * ps[i].point;
  }
  return m;
}

}  // namespace

AisIteration ais_iteration(ProposalPopulation& pop, const LogTarget& target, std::size_t M,
                           RandomStream& rng) {
  const std::size_t N = pop.size();
  if (N == 0) throw Error("population: N must be at least 1");
  if (M < 1) throw Error("ais_iteration: M must be at least 1");
  const std::vector<Gaussian> qs = gaussians(pop.means, pop.scales);

  std::vector<Vec> pts(N * M);
  for_each_stream(rng, N, [&](std::size_t n, RandomStream& s) {
    for (std::size_t m = 0; m < M; ++m) pts[n * M + m] = qs[n].sample(s);
  });

  pop.mean_history.push_back(pop.means);
  ++pop.t;
  std::vector<std::vector<Gaussian>> past;
  if (pop.denominator == Denominator::temporal_mixture)
    for (const auto& h : pop.mean_history) past.push_back(gaussians(h, pop.scales));

  AisIteration it;
  it.t = pop.t;
  it.log_target.resize(N * M);
  std::vector<double> lq(std::max(N, past.size()));
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t m = 0; m < M; ++m) {
      const Vec& x = pts[n * M + m];
      double den = 0.0;
      switch (pop.denominator) {
        case Denominator::own:
          den = qs[n].log_pdf(x);
          break;
        case Denominator::spatial_mixture:
          den = mixture_log_pdf(qs, x);
          break;
        case Denominator::temporal_mixture: {
          std::vector<double> l(past.size());
          for (std::size_t tau = 0; tau < past.size(); ++tau) l[tau] = past[tau][n].log_pdf(x);
          den = log_sum_exp(l) - std::log(static_cast<double>(past.size()));
          break;
        }
      }
      const double lp = target.log_density(x);
      it.log_target[n * M + m] = lp;
      it.samples.add(x, lp - den);
    }
  }

  const std::vector<double> lw = it.samples.log_weights();
  const double lse = log_sum_exp(lw);
  it.degenerate = !(lse > kNegInf) || !std::isfinite(lse);
  it.ess = it.degenerate ? 0.0 : ess_from_log_weights(lw);
  if (it.degenerate) return it;

  switch (pop.rule) {
    case Adaptation::none:
      break;
    case Adaptation::resample_global:
      for (std::size_t n = 0; n < N; ++n) pop.means[n] = pts[rng.categorical_log(lw)];
      break;
    case Adaptation::resample_local:
      for (std::size_t n = 0; n < N; ++n) {
        std::vector<double> local(lw.begin() + n * M, lw.begin() + (n + 1) * M);
        if (log_sum_exp(local) == kNegInf) continue;  // this proposal keeps its mean
        pop.means[n] = pts[n * M + rng.categorical_log(local)];
      }
      break;
    case Adaptation::moment_fit:
      for (std::size_t n = 0; n < N; ++n) {
        bool ok = false;
        Vec m = weighted_mean(it.samples, n * M, (n + 1) * M, &ok);
        if (ok) pop.means[n] = m;
      }
      break;
    case Adaptation::mcmc_move:
      for (std::size_t n = 0; n < N; ++n) {
        const Proposal rw = gaussian_random_walk(pop.scales[n]);
        pop.means[n] = mh_step(pop.means[n], target, rw, rng).state;
      }
      break;
    case Adaptation::gradient_move: {
      if (!target.has_grad()) throw Error("gradient_move needs a target gradient");
      for (std::size_t n = 0; n < N; ++n) {
        const double eta = 0.1 * pop.scales[n].trace() / pop.dim();
        Vec mu = pop.means[n];
        double lp = target.log_density(mu);
        for (int k = 0; k < 10; ++k) {
          const Vec g = target.grad_log(mu);
          if (!g.allFinite()) break;
          const Vec next = mu + eta * g;
          const double lpn = target.log_density(next);
          if (!(lpn > lp)) break;
          mu = next;
          lp = lpn;
        }
        pop.means[n] = mu;
      }
      break;
    }
  }
  return it;
}

AisEstimate ais_estimate(const std::vector<ParticleSet>& pool) {
  std::vector<double> lw;
  for (const auto& ps : pool)
    for (const auto& s : ps.samples()) lw.push_back(s.log_weight);
  if (lw.empty()) throw Error("empty pool");
  const double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw Error("degenerate weights");
  AisEstimate e;
  e.count = lw.size();
  e.log_z = lse - std::log(static_cast<double>(lw.size()));
  e.mean = Vec::Zero(pool.front()[0].point.size());
  for (const auto& ps : pool)
    for (const auto& s : ps.samples())
      if (s.log_weight != kNegInf) e.mean += std::exp(s.log_weight - lse) * s.point;
  return e;
}

double ais_estimate(const std::vector<ParticleSet>& pool, const std::function<double(const Vec&)>& g) {
  std::vector<double> lw;
  for (const auto& ps : pool)
    for (const auto& s : ps.samples()) lw.push_back(s.log_weight);
  if (lw.empty()) throw Error("empty pool");
  const double lse = log_sum_exp(lw);
  if (lse == kNegInf) throw Error("degenerate weights");
  double acc = 0.0;
  for (const auto& ps : pool)
    for (const auto& s : ps.samples())
      if (s.log_weight != kNegInf) acc += std::exp(s.log_weight - lse) * g(s.point);
  return acc;
}

double ais_unnormalized_estimate(const std::vector<ParticleSet>& pool,
                                 const std::function<double(const Vec&)>& g, double Z) {
  if (!(Z > 0.0)) throw Error("ais_unnormalized_estimate: Z must be positive");
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& ps : pool)
    for (const auto& s : ps.samples()) {
      ++n;
      if (s.log_weight != kNegInf) acc += s.weight() * g(s.point);
    }
  if (n == 0) throw Error("empty pool");
  return acc / (static_cast<double>(n) * Z);
}

ParticleSet amis_reweight(const std::vector<std::vector<Vec>>& history,
                          const std::vector<Mat>& scales, const std::vector<Vec>& points,
                          const std::vector<double>& log_target) {
  if (history.empty()) throw Error("empty history");
  if (points.size() != log_target.size()) throw Error("amis_reweight: size mismatch");
  std::vector<Gaussian> all;
  for (const auto& h : history)
    for (std::size_t n = 0; n < h.size(); ++n) all.emplace_back(h[n], scales[n]);
  ParticleSet ps;
  for (std::size_t i = 0; i < points.size(); ++i)
    ps.add(points[i], log_target[i] - mixture_log_pdf(all, points[i]));
  return ps;
}

std::string ais_log_line(const ProposalPopulation& pop, const AisIteration& it) {
  nlohmann::json j;
  j["t"] = it.t;
  nlohmann::json means = nlohmann::json::array();
  for (const auto& m : pop.means) means.push_back(std::vector<double>(m.data(), m.data() + m.size()));
  j["means"] = means;
  j["ess"] = it.ess;
  j["log_z"] = it.samples.log_z_hat();
  j["degenerate"] = it.degenerate;
  return j.dump();
}

}  // namespace mc
