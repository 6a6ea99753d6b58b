#include "mc/smc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace mc {

Vec flatten(const Path& path) {
  if (path.empty()) return Vec();
  const auto k = path[0].size();
  Vec x(k * static_cast<Eigen::Index>(path.size()));
  for (std::size_t d = 0; d < path.size(); ++d) x.segment(static_cast<Eigen::Index>(d) * k, k) = path[d];
  return x;
}

Path unflatten(const Vec& x, int stages, int state_dim) {
  if (x.size() != static_cast<Eigen::Index>(stages) * state_dim) throw Error("unflatten: size mismatch");
  Path p(stages);
  for (int d = 0; d < stages; ++d) p[d] = x.segment(static_cast<Eigen::Index>(d) * state_dim, state_dim);
  return p;
}

LogTarget joint_target(const SequentialModel& model) {
  LogTarget t;
  t.dim = model.stages * model.state_dim;
  t.log_density = [model](const Vec& x) {
    const Path p = unflatten(x, model.stages, model.state_dim);
    double s = 0.0;
    for (int d = 0; d < model.stages; ++d) {
      s += model.log_gamma(d, p[d], d ? &p[d - 1] : nullptr);
      if (s == kNegInf) break;
    }
    return s;
  };
  return t;
}

Proposal joint_proposal(const SequentialModel& model) {
  Proposal q;
  q.dim = model.stages * model.state_dim;
  q.sample = [model](RandomStream& rng, const Vec*) {
    Path p;
    for (int d = 0; d < model.stages; ++d) p.push_back(model.sample_q(d, d ? &p[d - 1] : nullptr, rng));
    return flatten(p);
  };
  q.log_density = [model](const Vec& x, const Vec*) {
    const Path p = unflatten(x, model.stages, model.state_dim);
    double s = 0.0;
    for (int d = 0; d < model.stages; ++d) s += model.log_q(d, p[d], d ? &p[d - 1] : nullptr);
    return s;
  };
  return q;
}

ParticleSet ParticleSystem::particles() const {
  ParticleSet ps;
  for (std::size_t m = 0; m < paths.size(); ++m) ps.add(flatten(paths[m]), log_w[m]);
  return ps;
}

ParticleSystem sis_init(std::size_t M, RandomStream& rng) {
  if (M < 1) throw Error("particle system: M must be at least 1");
  ParticleSystem sys;
  sys.paths.assign(M, Path{});
  sys.log_w.assign(M, 0.0);
  sys.epoch_start_lse = log_sum_exp(sys.log_w);  // log M
  if (M > 1) sys.streams = rng.split(M);
  return sys;
}

namespace {

RandomStream& stream_for(ParticleSystem& sys, std::size_t m, RandomStream& rng) {
  return sys.streams.empty() ? rng : sys.streams[m];
}

double stage_beta(const SequentialModel& model, int d, const Path& path) {
  const Vec* prev = d ? &path[d - 1] : nullptr;
  const double lq = model.log_q(d, path[d], prev);
  if (lq == kNegInf) throw Error("stage " + std::to_string(d) + ": sample outside proposal support");
  return model.log_gamma(d, path[d], prev) - lq;
}

void record_stage(ParticleSystem& sys, std::vector<double> lb) {
  std::vector<Vec> xs;
  xs.reserve(sys.size());
  for (const auto& p : sys.paths) xs.push_back(p.back());
  sys.states.push_back(std::move(xs));
  sys.log_beta.push_back(std::move(lb));
  sys.log_w_pre.push_back(sys.log_w);
  sys.log_z_hat.push_back(log_mean_exp(sys.log_w));
  sys.ancestors.emplace_back();
  sys.resampled.push_back(0);
  ++sys.stage;
}

void check_weights(const ParticleSystem& sys, int d) {
  const double lse = log_sum_exp(sys.log_w);
  if (lse == kNegInf || std::isnan(lse))
    throw NumericalError("all weights zero at stage " + std::to_string(d));
}

}  // namespace

void sis_advance(ParticleSystem& sys, const SequentialModel& model, RandomStream& rng) {
  const int d = sys.stage;
  if (d >= model.stages) throw Error("sis_advance: all stages done");
  const std::size_t M = sys.size();
  std::vector<double> lb(M);
  for (std::size_t m = 0; m < M; ++m) {
    Path& p = sys.paths[m];
    p.push_back(model.sample_q(d, d ? &p[d - 1] : nullptr, stream_for(sys, m, rng)));
    lb[m] = stage_beta(model, d, p);
    sys.log_w[m] += lb[m];
  }
  record_stage(sys, std::move(lb));
}

std::vector<std::size_t> resample_indices(const std::vector<double>& log_w, std::size_t count,
                                          ResamplingScheme scheme, RandomStream& rng) {
  std::vector<std::size_t> idx(count);
  if (scheme == ResamplingScheme::multinomial) {
    // Same draws as repeated categorical_log calls, with one cumulative table.
    if (log_w.empty()) throw Error("categorical: no weights");
    if (log_w.size() == 1) return idx;
    double mx = kNegInf;
    for (double lw : log_w) mx = std::max(mx, lw);
    if (!std::isfinite(mx)) throw Error("degenerate weights");
    std::vector<double> cum(log_w.size());
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
      const double w = std::exp(log_w[i] - mx);
      if (w > 0.0) acc += w, last = i;
      cum[i] = acc;
    }
    for (auto& i : idx) {
      const double u = rng.uniform() * acc;
      const auto it = std::upper_bound(cum.begin(), cum.end(), u);
      i = it == cum.end() ? last : static_cast<std::size_t>(it - cum.begin());
    }
    return idx;
  }
  const double lse = log_sum_exp(log_w);
  if (lse == kNegInf) throw Error("degenerate weights");
  const double u = rng.uniform();
  double c = std::exp(log_w[0] - lse);
  std::size_t j = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double pos = (static_cast<double>(k) + u) / static_cast<double>(count);
    while (pos > c && j + 1 < log_w.size()) c += std::exp(log_w[++j] - lse);
    idx[k] = j;
  }
  return idx;
}

SirResult sir_run(const SequentialModel& model, std::size_t M, const SirOptions& opt,
                  RandomStream& rng) {
  if (M < 2) throw Error("sir_run: M must be at least 2");
  if (!(opt.eta >= 0.0 && opt.eta <= 1.0)) throw Error("sir_run: eta must be in [0, 1]");
  ParticleSystem sys = sis_init(M, rng);
  for (int d = 0; d < model.stages; ++d) {
    sis_advance(sys, model, rng);
    check_weights(sys, d);
    const double ess = ess_from_log_weights(sys.log_w, opt.ess);
    if (ess < opt.eta * static_cast<double>(M)) {
      const double lse = log_sum_exp(sys.log_w);
      sys.log_z_tilde += lse - sys.epoch_start_lse;
      const auto idx = resample_indices(sys.log_w, M, opt.scheme, rng);
      std::vector<Path> np(M);
      for (std::size_t m = 0; m < M; ++m) np[m] = sys.paths[idx[m]];
      sys.paths = std::move(np);
      sys.log_w.assign(M, sys.log_z_hat.back());
      sys.epoch_start_lse = log_sum_exp(sys.log_w);
      sys.ancestors.back() = idx;
      sys.resampled.back() = 1;
    }
  }
  sys.log_z_tilde += log_sum_exp(sys.log_w) - sys.epoch_start_lse;
  sys.epoch_start_lse = log_sum_exp(sys.log_w);
  SirResult r;
  r.log_z_hat = sys.log_z();
  r.log_z_tilde = sys.log_z_tilde;
  r.system = std::move(sys);
  return r;
}

double marginal_z_tilde(const ParticleSystem& sys) {
  double total = 0.0;
  const std::size_t M = sys.size();
  for (int d = 0; d < sys.stage; ++d) {
    std::vector<double> prev;
    if (d == 0 || sys.resampled[d - 1]) prev.assign(M, 0.0);
    else prev = sys.log_w_pre[d - 1];
    const double den = log_sum_exp(prev);
    if (den == kNegInf) throw NumericalError("marginal_z_tilde: zero denominator");
    std::vector<double> terms(M);
    for (std::size_t m = 0; m < M; ++m) terms[m] = prev[m] + sys.log_beta[d][m];
    total += log_sum_exp(terms) - den;
  }
  return total;
}

ParticleSystem cpf_run(const SequentialModel& model, const Path& reference, std::size_t M,
                       RandomStream& rng) {
  if (static_cast<int>(reference.size()) != model.stages) throw Error("cpf: reference length differs from D");
  ParticleSystem sys = sis_init(M, rng);
  for (int d = 0; d < model.stages; ++d) {
    std::vector<double> lb(M);
    for (std::size_t m = 0; m < M; ++m) {
      Path& p = sys.paths[m];
      if (m == 0) {
        p.push_back(reference[d]);
        const double b = stage_beta(model, d, p);
        if (b == kNegInf || std::isnan(b)) throw Error("invalid reference");
        lb[m] = b;
      } else {
        p.push_back(model.sample_q(d, d ? &p[d - 1] : nullptr, stream_for(sys, m, rng)));
        lb[m] = stage_beta(model, d, p);
      }
      sys.log_w[m] += lb[m];
    }
    record_stage(sys, std::move(lb));
    check_weights(sys, d);
    if (M > 1) {
      std::vector<std::size_t> idx(M, 0);
      const auto free = resample_indices(sys.log_w, M - 1, ResamplingScheme::multinomial, rng);
      std::copy(free.begin(), free.end(), idx.begin() + 1);
      std::vector<Path> np(M);
      for (std::size_t m = 0; m < M; ++m) np[m] = sys.paths[idx[m]];
      sys.paths = std::move(np);
      sys.ancestors.back() = idx;
      sys.resampled.back() = 1;
    }
    sys.log_w.assign(M, sys.log_z_hat.back());
  }
  return sys;
}

void write_particle_dump(const ParticleSystem& sys, std::ostream& os) {
  const int k = sys.states.empty() ? 0 : static_cast<int>(sys.states[0][0].size());
  os << "stage,particle";
  for (int i = 0; i < k; ++i) os << ",x" << i;
  os << ",weight,ancestor\n";
  char buf[32];
  for (int d = 0; d < sys.stage; ++d) {
    for (std::size_t m = 0; m < sys.size(); ++m) {
      os << d << ',' << m;
      for (int i = 0; i < k; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", sys.states[d][m][i]);
        os << ',' << buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g", std::exp(sys.log_w_pre[d][m]));
      os << ',' << buf << ',';
      os << (sys.ancestors[d].empty() ? m : sys.ancestors[d][m]) << '\n';
    }
  }
}

}  // namespace mc
