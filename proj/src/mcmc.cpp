#include "mc/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace mc {

double ChainTrace::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  std::size_t n = 0;
  for (char a : accepted) n += a ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(accepted.size());
}

std::vector<double> ChainTrace::column(int d, bool after_burn_in) const {
  std::vector<double> out;
  const std::size_t start = after_burn_in ? burn_in : 0;
  out.reserve(states.size() - start);
  for (std::size_t t = start; t < states.size(); ++t) out.push_back(states[t][d]);
  return out;
}

ChainTrace run_chain(const Kernel& kernel, const Vec& init, std::size_t T, std::size_t burn_in,
                     RandomStream& rng) {
  if (!(T > burn_in)) throw Error("run_chain: need T > burn_in");
  ChainTrace tr;
  tr.initial = init;
  tr.burn_in = burn_in;
  tr.states.reserve(T);
  tr.accepted.reserve(T);
  tr.aux.reserve(T);
  Vec x = init;
  for (std::size_t t = 1; t <= T; ++t) {
    StepResult r;
    try {
      r = kernel(x, t, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(t) + ": " + e.what());
    }
    x = r.state;
    tr.states.push_back(r.state);
    tr.accepted.push_back(r.accepted ? 1 : 0);
    tr.aux.push_back(std::move(r.aux));
  }
  return tr;
}

double trace_estimate(const ChainTrace& trace, const std::function<double(const Vec&)>& g) {
  if (trace.states.size() <= trace.burn_in) throw Error("no samples");
  double s = 0.0;
  for (std::size_t t = trace.burn_in; t < trace.states.size(); ++t) s += g(trace.states[t]);
  return s / static_cast<double>(trace.states.size() - trace.burn_in);
}

Vec trace_mean(const ChainTrace& trace) {
  if (trace.states.size() <= trace.burn_in) throw Error("no samples");
  Vec m = Vec::Zero(trace.states.front().size());
  for (std::size_t t = trace.burn_in; t < trace.states.size(); ++t) m += trace.states[t];
  return m / static_cast<double>(trace.states.size() - trace.burn_in);
}

ChainTrace thin(const ChainTrace& trace, std::size_t K) {
  if (K < 1) throw Error("thin: K must be at least 1");
  ChainTrace out;
  out.initial = trace.initial;
  out.burn_in = 0;
  // 1-based index burn_in + 1 + mK is vector slot burn_in + mK.
  for (std::size_t i = trace.burn_in; i < trace.states.size(); i += K) {
    out.states.push_back(trace.states[i]);
    out.accepted.push_back(trace.accepted[i]);
    out.aux.push_back(i < trace.aux.size() ? trace.aux[i] : Aux{});
  }
  if (out.states.empty()) throw Error("thin: empty result");
  return out;
}

namespace {

void put_real(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

std::vector<std::string> aux_keys(const ChainTrace& tr) {
  std::set<std::string> keys;
  for (const auto& a : tr.aux)
    for (const auto& [k, v] : a) keys.insert(k);
  return {keys.begin(), keys.end()};
}

void put_json_real(std::ostream& os, double v) {
  if (std::isfinite(v))
    put_real(os, v);
  else
    os << "null";
}

}  // namespace

void write_trace_csv(const ChainTrace& trace, std::ostream& os) {
  const auto keys = aux_keys(trace);
  const int D = trace.states.empty() ? 0 : static_cast<int>(trace.states.front().size());
  os << "t";
  for (int d = 0; d < D; ++d) os << ",x" << d;
  os << ",accepted";
  for (const auto& k : keys) os << "," << k;
  os << "\n";
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    os << (t + 1);
    for (int d = 0; d < D; ++d) {
      os << ",";
      put_real(os, trace.states[t][d]);
    }
    os << "," << (trace.accepted[t] ? 1 : 0);
    for (const auto& k : keys) {
      os << ",";
      auto it = trace.aux[t].find(k);
      if (it != trace.aux[t].end()) put_real(os, it->second);
    }
    os << "\n";
  }
}

void write_trace_jsonl(const ChainTrace& trace, std::ostream& os) {
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    os << "{\"t\":" << (t + 1) << ",\"state\":[";
    for (Eigen::Index d = 0; d < trace.states[t].size(); ++d) {
      if (d) os << ",";
      put_json_real(os, trace.states[t][d]);
    }
    os << "],\"accepted\":" << (trace.accepted[t] ? "true" : "false") << ",\"aux\":{";
    bool first = true;
    for (const auto& [k, v] : trace.aux[t]) {
      if (!first) os << ",";
      first = false;
      os << "\"" << k << "\":";
      put_json_real(os, v);
    }
    os << "}}\n";
  }
}

// ---- MH ---------------------------------------------------------------------

double mh_alpha(const Vec& x, double logp_x, const Vec& y, double logp_y, const Proposal& q) {
  double num = logp_y, den = logp_x;
  if (!q.symmetric) {
    num += q.log_q(x, y);
    den += q.log_q(y, x);
  }
  if (num == kNegInf) return 0.0;  // includes the case of two -inf terms
  if (den == kNegInf) return 1.0;
  if (std::isnan(num) || std::isnan(den)) throw NumericalError("mh_alpha: NaN log-density");
  const double lr = num - den;
  return lr >= 0.0 ? 1.0 : std::exp(lr);
}

MhResult mh_step(const Vec& state, double logp_state, const LogTarget& target,
                 const Proposal& proposal, RandomStream& rng) {
  Vec cand = proposal.draw(rng, state);
  if (proposal.log_q(cand, state) == kNegInf) throw Error("invalid proposal sample");
  const double lp = target.log_density(cand);
  MhResult r;
  r.alpha = mh_alpha(state, logp_state, cand, lp, proposal);
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = std::move(cand);
    r.log_density = lp;
    r.accepted = true;
  } else {
    r.state = state;
    r.log_density = logp_state;
  }
  return r;
}

MhResult mh_step(const Vec& state, const LogTarget& target, const Proposal& proposal,
                 RandomStream& rng) {
  return mh_step(state, target.log_density(state), target, proposal, rng);
}

Kernel mh_kernel(const LogTarget& target, const Proposal& proposal) {
  return [target, proposal](const Vec& x, std::size_t, RandomStream& rng) {
    MhResult r = mh_step(x, target, proposal, rng);
    return StepResult{std::move(r.state), r.accepted, Aux{{"alpha", r.alpha}}};
  };
}

double barker_alpha(const Vec& state, const Vec& candidate, const LogTarget& target,
                    const Proposal& proposal) {
  const double a = target.log_density(candidate) + proposal.log_q(state, candidate);
  const double b = target.log_density(state) + proposal.log_q(candidate, state);
  if (a == kNegInf && b == kNegInf) throw Error("degenerate ratio");
  // a' / (a' + b') = 1 / (1 + exp(b - a))
  if (a == kNegInf) return 0.0;
  if (b == kNegInf) return 1.0;
  const double d = b - a;
  return d > 0 ? std::exp(-d) / (1.0 + std::exp(-d)) : 1.0 / (1.0 + std::exp(d));
}

// ---- Gibbs --------------------------------------------------------------------

int ScanPolicy::index(std::size_t t, RandomStream& rng) const {
  if (dim < 1) throw Error("ScanPolicy: dim must be positive");
  if (t < 1) throw Error("ScanPolicy: steps are 1-based");
  switch (kind) {
    case ScanKind::systematic:
      return static_cast<int>((t - 1) % static_cast<std::size_t>(dim));
    case ScanKind::symmetric: {
      if (dim == 1) return 0;
      const std::size_t period = 2 * static_cast<std::size_t>(dim) - 2;
      const auto r = static_cast<int>((t - 1) % period);
      return r < dim ? r : 2 * dim - 2 - r;
    }
    case ScanKind::random:
      return static_cast<int>(rng.index(static_cast<std::size_t>(dim)));
  }
  return 0;
}

Vec gibbs_step(const Vec& state, const ConditionalSampler& sampler, const ScanPolicy& policy,
               std::size_t t, RandomStream& rng) {
  if (state.size() != policy.dim) throw Error("gibbs_step: state dimension mismatch");
  const int d = policy.index(t, rng);
  Vec out = state;
  try {
    out[d] = sampler(d, state, rng);
  } catch (const std::exception& e) {
    throw Error("gibbs_step: conditional sampler failed at coordinate " + std::to_string(d) +
                ": " + e.what());
  }
  return out;
}

Vec gibbs_block_step(const Vec& state, const BlockSampler& sampler,
                     const std::vector<std::vector<int>>& blocks, const ScanPolicy& policy,
                     std::size_t t, RandomStream& rng) {
  if (static_cast<int>(blocks.size()) != policy.dim)
    throw Error("gibbs_block_step: policy.dim must equal the number of blocks");
  const int b = policy.index(t, rng);
  Vec vals;
  try {
    vals = sampler(b, state, rng);
  } catch (const std::exception& e) {
    throw Error("gibbs_block_step: block sampler failed at block " + std::to_string(b) + ": " +
                e.what());
  }
  if (vals.size() != static_cast<Eigen::Index>(blocks[b].size()))
    throw Error("gibbs_block_step: block size mismatch");
  Vec out = state;
  for (std::size_t i = 0; i < blocks[b].size(); ++i) out[blocks[b][i]] = vals[i];
  return out;
}

ChainTrace run_gibbs(const ConditionalSampler& sampler, const ScanPolicy& policy, const Vec& init,
                     std::size_t sweeps, std::size_t burn_in, bool keep_intermediate,
                     RandomStream& rng) {
  const auto D = static_cast<std::size_t>(policy.dim);
  ChainTrace tr;
  tr.initial = init;
  tr.burn_in = keep_intermediate ? burn_in * D : burn_in;
  Vec x = init;
  std::size_t t = 0;
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t k = 0; k < D; ++k) {
      x = gibbs_step(x, sampler, policy, ++t, rng);
      if (keep_intermediate) {
        tr.states.push_back(x);
        tr.accepted.push_back(1);
        tr.aux.emplace_back();
      }
    }
    if (!keep_intermediate) {
      tr.states.push_back(x);
      tr.accepted.push_back(1);
      tr.aux.emplace_back();
    }
  }
  if (tr.states.size() <= tr.burn_in) throw Error("run_gibbs: need sweeps > burn_in");
  return tr;
}

Vec mh_within_gibbs_step(const Vec& state, const LogTarget& target,
                         const std::vector<Proposal>& proposals, int T_MH,
                         const ScanPolicy& policy, std::size_t t, RandomStream& rng, Aux* aux) {
  if (T_MH < 1) throw Error("mh_within_gibbs_step: T_MH must be at least 1");
  if (proposals.empty()) throw Error("mh_within_gibbs_step: no proposals");
  const int d = policy.index(t, rng);
  const Proposal& q = proposals.size() == 1 ? proposals[0] : proposals.at(d);
  Vec x = state;
  double lp = target.log_density(x);
  int acc = 0;
  for (int k = 0; k < T_MH; ++k) {
    const Vec cur = Vec::Constant(1, x[d]);
    Vec cand1 = q.draw(rng, cur);
    if (q.log_q(cand1, cur) == kNegInf) throw Error("invalid proposal sample");
    Vec y = x;
    y[d] = cand1[0];
    const double lpy = target.log_density(y);
    const double alpha = mh_alpha(cur, lp, cand1, lpy, q);
    if (rng.uniform() <= alpha && alpha > 0.0) {
      x = std::move(y);
      lp = lpy;
      ++acc;
    }
  }
  if (aux) (*aux)["acc_" + std::to_string(d)] += acc;
  return x;
}

DaState da_step(const std::vector<Vec>& latents, const Vec& state, const AugmentationModel& model,
                std::size_t K, RandomStream& rng) {
  if (K < 1) throw Error("da_step: K must be at least 1");
  if (latents.empty()) throw Error("da_step: no latent draws");
  (void)state;
  DaState out;
  // The mixture has equal weights 1/K over the current latent draws.
  const std::size_t k = latents.size() == 1 ? 0 : rng.index(latents.size());
  out.theta = model.sample_theta(latents[k], rng);
  out.latents.reserve(K);
  for (std::size_t i = 0; i < K; ++i) {
    try {
      out.latents.push_back(model.sample_latent(out.theta, rng));
    } catch (const std::exception& e) {
      throw Error(std::string("da_step: latent sampler failed: ") + e.what());
    }
  }
  return out;
}

// ---- slice / line samplers ----------------------------------------------------

double slice_step_1d(double x0, const std::function<double(double)>& f, RandomStream& rng,
                     const SliceOptions& opt) {
  const double f0 = f(x0);
  if (f0 == kNegInf || std::isnan(f0)) throw Error("slice_step_1d: state outside support");
  const double w = opt.width;
  // Slice level in log scale; log(U) with U in (0, 1].
  const double y = f0 + std::log1p(-rng.uniform());
  double L = x0 - w * rng.uniform();
  double R = L + w;
  int k = opt.max_doublings;
  while (k > 0 && (y < f(L) || y < f(R))) {
    if (rng.uniform() < 0.5)
      L -= (R - L);
    else
      R += (R - L);
    --k;
  }
  if (y < f(L) || y < f(R)) throw Error("unbounded slice");

  // Acceptability test for the doubling procedure.
  auto acceptable = [&](double x1) {
    double Lh = L, Rh = R;
    bool diff = false;
    while (Rh - Lh > 1.1 * w) {
      const double M = 0.5 * (Lh + Rh);
      if ((x0 < M && x1 >= M) || (x0 >= M && x1 < M)) diff = true;
      if (x1 < M)
        Rh = M;
      else
        Lh = M;
      if (diff && y >= f(Lh) && y >= f(Rh)) return false;
    }
    return true;
  };

  double lo = L, hi = R;
  for (int it = 0; it < 100000; ++it) {
    const double x1 = lo + rng.uniform() * (hi - lo);
    if (y < f(x1) && acceptable(x1)) return x1;
    if (x1 < x0)
      lo = x1;
    else
      hi = x1;
  }
  throw NumericalError("slice_step_1d: shrinkage did not terminate");
}

double sample_line(const std::function<double(double)>& log_line, RandomStream& rng,
                   const LineSamplerOptions& opt) {
  if (opt.exact) return slice_step_1d(0.0, log_line, rng, opt.slice);
  double r = 0.0;
  double lp = log_line(0.0);
  if (lp == kNegInf) throw Error("line sampler: start outside support");
  for (int k = 0; k < opt.steps; ++k) {
    const double c = r + opt.step_sd * rng.normal();
    const double lc = log_line(c);
    if (lc == kNegInf) {
      rng.uniform();
      continue;
    }
    const double lu = std::log(rng.uniform());
    if (lu <= lc - lp) {
      r = c;
      lp = lc;
    }
  }
  return r;
}

DirectionSampler uniform_directions(int dim) {
  return [dim](const Vec&, RandomStream& rng) {
    Vec v = rng.normal_vector(dim);
    double n = v.norm();
    while (n == 0.0) {
      v = rng.normal_vector(dim);
      n = v.norm();
    }
    return Vec(v / n);
  };
}

DirectionSampler axis_directions(int dim) {
  return [dim](const Vec&, RandomStream& rng) {
    Vec e = Vec::Zero(dim);
    e[static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(dim)))] = 1.0;
    return e;
  };
}

Vec hit_and_run_step(const Vec& state, const LogTarget& target, const DirectionSampler& directions,
                     RandomStream& rng, const LineSamplerOptions& opt) {
  const Vec dir = directions(state, rng);
  if (dir.size() != state.size()) throw Error("hit_and_run_step: direction dimension mismatch");
  auto line = [&](double lam) { return target.log_density(state + lam * dir); };
  double lam;
  try {
    lam = sample_line(line, rng, opt);
  } catch (const NumericalError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string("hit_and_run_step: line sampler failed: ") + e.what());
  }
  return state + lam * dir;
}

std::vector<Vec> ads_step(const std::vector<Vec>& support, const LogTarget& target, AdsMode mode,
                          RandomStream& rng, const LineSamplerOptions& opt) {
  const std::size_t K = support.size();
  const int D = target.dim;
  if (K <= static_cast<std::size_t>(D)) throw Error("support too small");
  const std::size_t c = rng.index(K);
  const Vec& xc = support[c];
  // Uniform index in {0..K-1} \ excluded (excluded sorted ascending).
  auto pick_other = [&](std::vector<std::size_t> excluded) {
    std::sort(excluded.begin(), excluded.end());
    std::size_t i = rng.index(K - excluded.size());
    for (std::size_t e : excluded)
      if (i >= e) ++i;
    return i;
  };
  Vec theta;
  double lambda = 0.0;
  switch (mode) {
    case AdsMode::snooker: {
      theta = support[pick_other({c})];
      lambda = -1.0;
      break;
    }
    case AdsMode::parallel: {
      const std::size_t a = pick_other({c});
      const std::size_t b = pick_other({c, a});
      theta = support[a] - support[b];
      break;
    }
    case AdsMode::hitrun:
      theta = uniform_directions(D)(xc, rng);
      break;
    case AdsMode::gibbs:
      theta = axis_directions(D)(xc, rng);
      break;
  }
  const Vec dir = theta + lambda * xc;
  if (dir.squaredNorm() == 0.0) throw Error("zero direction");
  auto line = [&](double r) {
    const double jac = std::abs(1.0 + r * lambda);
    if (jac == 0.0) return kNegInf;
    return target.log_density(xc + r * dir) + (D - 1) * std::log(jac);
  };
  const double r = sample_line(line, rng, opt);
  std::vector<Vec> out = support;
  out[c] = xc + r * dir;
  return out;
}

}  // namespace mc
