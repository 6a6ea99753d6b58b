#include "mc/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "mc/dist.hpp"

namespace mc {

// ---- AM -----------------------------------------------------------------------

double AdaptiveState::gain_at(std::size_t t) const {
  if (gain) return gain(t);
  return std::pow(static_cast<double>(t), -0.6);
}

AdaptiveState am_init(const Vec& theta0, const Mat& cov0, double lambda0) {
  if (cov0.rows() != theta0.size() || cov0.cols() != theta0.size())
    throw Error("am_init: covariance shape mismatch");
  if (!(lambda0 > 0.0)) throw Error("am_init: scale must be positive");
  AdaptiveState a;
  a.mean_est = theta0;
  a.cov_est = cov0;
  a.scale = lambda0;
  a.count = 1;
  a.scatter = Mat::Zero(theta0.size(), theta0.size());
  return a;
}

Mat am_covariance(const AdaptiveState& a) {
  const auto D = a.mean_est.size();
  Mat c = Mat::Identity(D, D) * a.eps;
  if (a.count >= 2) c += a.scatter / static_cast<double>(a.count - 1);
  if (!c.allFinite()) throw NumericalError("AM: non-finite covariance");
  return 0.5 * (c + c.transpose());
}

void am_record(AdaptiveState& a, const Vec& theta) {
  // Welford update of mean and scatter.
  ++a.count;
  const Vec delta = theta - a.mean_est;
  a.mean_est += delta / static_cast<double>(a.count);
  a.scatter += delta * (theta - a.mean_est).transpose();
  if (a.adapt_cov) a.cov_est = am_covariance(a);
}

double optimal_scale(int dim) {
  if (dim < 1) throw Error("optimal_scale: dim must be at least 1");
  return 2.38 * 2.38 / dim;
}

MhResult am_step(const Vec& state, double logp_state, AdaptiveState& a, const LogTarget& target,
                 std::size_t t, RandomStream& rng) {
  const Proposal q = gaussian_random_walk(a.scale * a.cov_est);
  MhResult r = mh_step(state, logp_state, target, q, rng);
  am_record(a, r.state);
  const double g = a.gain_at(t);
  if (g != 0.0) {
    a.scale = std::exp(std::log(a.scale) + g * (r.alpha - a.target_ar));
    if (!(a.scale > 0.0) || !std::isfinite(a.scale)) throw NumericalError("AM: scale left (0, inf)");
  }
  return r;
}

// ---- AGM-MH ---------------------------------------------------------------------

double MixtureProposal::log_density(const Vec& x) const {
  std::vector<double> terms(size());
  for (std::size_t n = 0; n < size(); ++n) {
    double l = weights[n] > 0.0 ? std::log(weights[n]) : kNegInf;
    for (Eigen::Index d = 0; d < x.size(); ++d)
      l += normal_log_pdf(x[d], means[n][d], std::sqrt(variances[n][d]));
    terms[n] = l;
  }
  return log_sum_exp(terms);
}

Vec MixtureProposal::sample(RandomStream& rng) const {
  const std::size_t n = rng.categorical(weights);
  Vec x(dim());
  for (int d = 0; d < dim(); ++d) x[d] = means[n][d] + std::sqrt(variances[n][d]) * rng.normal();
  return x;
}

std::vector<double> MixtureProposal::responsibilities(const Vec& x) const {
  std::vector<double> l(size());
  for (std::size_t n = 0; n < size(); ++n) {
    l[n] = weights[n] > 0.0 ? std::log(weights[n]) : kNegInf;
    for (Eigen::Index d = 0; d < x.size(); ++d)
      l[n] += normal_log_pdf(x[d], means[n][d], std::sqrt(variances[n][d]));
  }
  const double lse = log_sum_exp(l);
  std::vector<double> r(size());
  if (lse == kNegInf) {
    // x is far from every component: give it to the nearest mean.
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t n = 0; n < size(); ++n) {
      const double dist = (x - means[n]).squaredNorm();
      if (dist < bd) bd = dist, best = n;
    }
    r[best] = 1.0;
    return r;
  }
  for (std::size_t n = 0; n < size(); ++n) r[n] = std::exp(l[n] - lse);
  return r;
}

MixtureProposal make_mixture(const std::vector<Vec>& means, const std::vector<Vec>& variances) {
  if (means.empty()) throw Error("empty mixture");
  if (means.size() != variances.size()) throw Error("mixture: size mismatch");
  MixtureProposal m;
  const double w = 1.0 / static_cast<double>(means.size());
  for (std::size_t n = 0; n < means.size(); ++n) {
    if (means[n].size() != means[0].size() || variances[n].size() != means[0].size())
      throw Error("mixture: dimension mismatch");
    if ((variances[n].array() <= 0.0).any()) throw Error("mixture: variances must be positive");
    m.weights.push_back(w);
    m.means.push_back(means[n]);
    m.variances.push_back(variances[n]);
    m.counts.push_back(1.0);
    m.sq_dev.push_back(variances[n]);
  }
  return m;
}

void mixture_update(MixtureProposal& mix, const Vec& x) {
  const std::vector<double> r = mix.responsibilities(x);
  double total = 0.0;
  for (std::size_t n = 0; n < mix.size(); ++n) {
    if (r[n] > 0.0) {
      const double c = mix.counts[n] + r[n];
      const Vec delta = x - mix.means[n];
      mix.means[n] += (r[n] / c) * delta;
      mix.sq_dev[n] += r[n] * delta.cwiseProduct(x - mix.means[n]);
      mix.counts[n] = c;
      mix.variances[n] = (mix.sq_dev[n] / c).cwiseMax(mix.var_floor);
    }
    total += mix.counts[n];
  }
  for (std::size_t n = 0; n < mix.size(); ++n) mix.weights[n] = mix.counts[n] / total;
}

MhResult agm_mh_step(const Vec& state, double logp_state, MixtureProposal& mix,
                     const LogTarget& target, std::size_t t, std::size_t T_train,
                     RandomStream& rng) {
  if (mix.size() == 0) throw Error("empty mixture");
  Vec cand = mix.sample(rng);
  const double lp = target.log_density(cand);
  const double lq_cand = mix.log_density(cand), lq_state = mix.log_density(state);
  MhResult r;
  const double num = lp + lq_state, den = logp_state + lq_cand;
  if (num == kNegInf) r.alpha = 0.0;
  else if (den == kNegInf) r.alpha = 1.0;
  else r.alpha = std::min(1.0, std::exp(num - den));
  const double u = rng.uniform();
  if (u <= r.alpha && r.alpha > 0.0) {
    r.state = std::move(cand);
    r.log_density = lp;
    r.accepted = true;
  } else {
    r.state = state;
    r.log_density = logp_state;
  }
  if (t >= T_train) mixture_update(mix, r.state);
  return r;
}

// ---- Piecewise proposals ---------------------------------------------------------

namespace {

struct Line {
  double x0, y0, s;
  double at(double x) const { return y0 + s * (x - x0); }
};

Line secant(const std::vector<double>& p, const std::vector<double>& v, std::size_t i) {
  return {p[i], v[i], (v[i + 1] - v[i]) / (p[i + 1] - p[i])};
}

// log of the integral of exp(line) over [lo, hi].
double line_log_mass(const Line& l, double lo, double hi) {
  if (!(hi > lo)) return kNegInf;
  const double w = hi - lo;
  if (l.s == 0.0) {
    if (!std::isfinite(w)) return kInf;
    return l.at(std::isfinite(lo) ? lo : hi) + std::log(w);
  }
  if (l.s < 0.0) {
    if (!std::isfinite(lo)) return kInf;
    return l.at(lo) + std::log(-std::expm1(l.s * w)) - std::log(-l.s);
  }
  if (!std::isfinite(hi)) return kInf;
  return l.at(hi) + std::log(-std::expm1(-l.s * w)) - std::log(l.s);
}

// Distance from an edge with log value y, rising at rate `out` per unit
// distance, at which the accumulated mass reaches exp(log_cap).
double capped_length(double y, double out, double log_cap) {
  const double lr = log_cap - y;
  if (out == 0.0) return std::exp(lr);
  const double la = lr + std::log(std::fabs(out));
  if (out > 0.0) return (la > 30.0 ? la : std::log1p(std::exp(la))) / out;
  return std::log1p(-std::exp(la)) / out;
}

double sample_line_piece(const Line& l, double lo, double hi, double u1) {
  // u1 in (0, 1]
  const double w = hi - lo;
  double x;
  if (l.s == 0.0 || (std::isfinite(w) && std::fabs(l.s * w) < 1e-12)) {
    x = lo + (1.0 - u1) * w;
  } else if (l.s < 0.0) {
    const double e = std::isfinite(w) ? std::exp(l.s * w) : 0.0;
    x = lo + std::log(u1 + (1.0 - u1) * e) / l.s;
  } else {
    const double e = std::isfinite(w) ? std::exp(-l.s * w) : 0.0;
    x = hi + std::log(u1 + (1.0 - u1) * e) / l.s;
  }
  return std::clamp(x, lo, hi);
}

constexpr double kTailCap = 1e12;

}  // namespace

void PiecewiseProposal::finalize() {
  std::vector<double> lm;
  lm.reserve(pieces_.size());
  for (const auto& pc : pieces_) lm.push_back(pc.log_mass);
  log_total_ = log_sum_exp(lm);
  if (!std::isfinite(log_total_)) throw NumericalError("piecewise proposal: total mass not finite");
  cum_.resize(pieces_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    c += std::exp(pieces_[i].log_mass - log_total_);
    cum_[i] = c;
  }
  for (auto& v : cum_) v /= c;
}

PiecewiseProposal build_envelope(std::vector<double> p, std::vector<double> v, double lo,
                                 double hi) {
  const std::size_t K = p.size();
  if (K < 2 || v.size() != K) throw Error("arms: need at least 2 support points");
  for (std::size_t i = 0; i < K; ++i) {
    if (!std::isfinite(v[i])) throw Error("arms: log target not finite at a support point");
    if (i > 0 && !(p[i] > p[i - 1])) throw Error("arms: support with duplicate abscissae");
  }
  if (p.front() < lo || p.back() > hi) throw Error("arms: support outside the domain");

  PiecewiseProposal pp;
  pp.lo_ = lo;
  pp.hi_ = hi;
  pp.envelope_ = true;
  const double log_cap = std::log(kTailCap) + *std::max_element(v.begin(), v.end());

  auto add_piece = [&](const Line& l, double a, double b, int interval) {
    if (!(b > a)) return;
    pp.pieces_.push_back({a, b, l.x0, l.y0, l.s, line_log_mass(l, a, b), interval});
  };

  // Tails: outermost secants, cut to a finite mass if needed.
  const Line left = secant(p, v, 0), right = secant(p, v, K - 2);
  {
    double a = lo;
    double m = line_log_mass(left, lo, p[0]);
    if (!(m <= log_cap)) {
      a = p[0] - capped_length(v[0], -left.s, log_cap);
      if (a < lo) a = lo;
      pp.clipped_ = true;
    }
    add_piece(left, a, p[0], 0);
  }

  for (std::size_t i = 0; i + 1 < K; ++i) {
    // Interval [p_i, p_{i+1}]: W = max(L_i, min(L_{i-1}, L_{i+1})) with the
    // missing neighbour dropped at the two ends.
    const Line a = secant(p, v, i);
    std::vector<Line> cands{a};
    bool has_prev = K > 2 && i >= 1, has_next = K > 2 && i + 2 < K;
    Line b{}, c{};
    if (has_prev) cands.push_back(b = secant(p, v, i - 1));
    if (has_next) cands.push_back(c = secant(p, v, i + 1));
    auto W = [&](double x) {
      double r = a.at(x);
      if (has_prev && has_next) r = std::max(r, std::min(b.at(x), c.at(x)));
      else if (has_prev) r = std::max(r, b.at(x));
      else if (has_next) r = std::max(r, c.at(x));
      return r;
    };
    std::vector<double> cuts{p[i], p[i + 1]};
    for (std::size_t m = 0; m < cands.size(); ++m)
      for (std::size_t n = m + 1; n < cands.size(); ++n) {
        const Line &l1 = cands[m], &l2 = cands[n];
        if (l1.s == l2.s) continue;
        // l1.at(x) == l2.at(x)
        const double x = (l2.y0 - l2.s * l2.x0 - l1.y0 + l1.s * l1.x0) / (l1.s - l2.s);
        if (x > p[i] && x < p[i + 1]) cuts.push_back(x);
      }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (!(cuts[k + 1] > cuts[k])) continue;
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      const double wm = W(mid);
      const Line* best = &cands[0];
      for (const auto& l : cands)
        if (std::fabs(l.at(mid) - wm) < std::fabs(best->at(mid) - wm)) best = &l;
      add_piece(*best, cuts[k], cuts[k + 1], static_cast<int>(i + 1));
    }
  }

  {
    double b = hi;
    double m = line_log_mass(right, p[K - 1], hi);
    if (!(m <= log_cap)) {
      b = p[K - 1] + capped_length(v[K - 1], right.s, log_cap);
      if (b > hi) b = hi;
      pp.clipped_ = true;
    }
    add_piece(right, p[K - 1], b, static_cast<int>(K));
  }

  pp.support_ = std::move(p);
  pp.values_ = std::move(v);
  pp.finalize();
  return pp;
}

PiecewiseProposal build_interpolant(std::vector<double> p, std::vector<double> v) {
  const std::size_t K = p.size();
  if (K < 2 || v.size() != K) throw Error("interpolant: need at least 2 points");
  PiecewiseProposal pp;
  pp.envelope_ = false;
  pp.lo_ = p.front();
  pp.hi_ = p.back();
  for (std::size_t i = 0; i + 1 < K; ++i) {
    if (!(p[i + 1] > p[i])) throw Error("interpolant: points must be strictly increasing");
    if (v[i] == kNegInf || v[i + 1] == kNegInf) {
      pp.pieces_.push_back({p[i], p[i + 1], p[i], kNegInf, 0.0, kNegInf, static_cast<int>(i + 1)});
      continue;
    }
    const Line l = secant(p, v, i);
    pp.pieces_.push_back(
        {p[i], p[i + 1], l.x0, l.y0, l.s, line_log_mass(l, p[i], p[i + 1]), static_cast<int>(i + 1)});
  }
  pp.support_ = std::move(p);
  pp.values_ = std::move(v);
  pp.finalize();
  return pp;
}

std::size_t PiecewiseProposal::piece_of(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double val, const Piece& pc) { return val < pc.lo; });
  if (it == pieces_.begin()) return 0;
  return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

double PiecewiseProposal::log_envelope(double x) const {
  if (pieces_.empty() || x < pieces_.front().lo || x > pieces_.back().hi) return kNegInf;
  const Piece& pc = pieces_[piece_of(x)];
  if (pc.y0 == kNegInf) return kNegInf;
  return pc.y0 + pc.slope * (x - pc.x0);
}

double PiecewiseProposal::sample(RandomStream& rng) const {
  const double u0 = rng.uniform();
  const double u1 = 1.0 - rng.uniform();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), u0) - cum_.begin());
  if (i >= pieces_.size()) i = pieces_.size() - 1;
  while (pieces_[i].log_mass == kNegInf && i > 0) --i;  // only reachable through rounding
  const Piece& pc = pieces_[i];
  return sample_line_piece(Line{pc.x0, pc.y0, pc.slope}, pc.lo, pc.hi, u1);
}

std::vector<double> PiecewiseProposal::piece_probabilities() const {
  std::vector<double> out;
  out.reserve(pieces_.size());
  for (const auto& pc : pieces_) out.push_back(std::exp(pc.log_mass - log_total_));
  return out;
}

PiecewiseProposal PiecewiseProposal::with_point(double x, double log_value) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it != support_.end() && *it == x) throw Error("arms: support with duplicate abscissae");
  const auto pos = it - support_.begin();
  std::vector<double> p = support_, v = values_;
  p.insert(p.begin() + pos, x);
  v.insert(v.begin() + pos, log_value);
  return envelope_ ? build_envelope(std::move(p), std::move(v), lo_, hi_)
                   : build_interpolant(std::move(p), std::move(v));
}

PiecewiseProposal arms_build(const std::vector<double>& support,
                             const std::function<double(double)>& log_target, double lo,
                             double hi) {
  std::vector<double> p = support;
  std::sort(p.begin(), p.end());
  std::vector<double> v;
  v.reserve(p.size());
  for (double x : p) v.push_back(log_target(x));
  return build_envelope(std::move(p), std::move(v), lo, hi);
}

double arms_alpha(double logp_state, double logq_state, double logp_cand, double logq_cand) {
  const double num = logp_cand + std::min(logp_state, logq_state);
  const double den = logp_state + std::min(logp_cand, logq_cand);
  if (num == kNegInf) return 0.0;
  if (den == kNegInf) return 1.0;
  return std::min(1.0, std::exp(num - den));
}

bool arms_rs_pass(double u, double logp, double logq) {
  return !(std::log(u) > logp - logq);
}

bool ia2rms_adds(double u, double logq, double logp) {
  if (logp == kNegInf) return false;
  return std::log(u) > logq - logp;
}

namespace {

bool is_support_point(const PiecewiseProposal& prop, double x) {
  const auto& s = prop.support();
  return std::binary_search(s.begin(), s.end(), x);
}

ArmsResult arms_like(double state, double logp_state, PiecewiseProposal& prop,
                     const std::function<double(double)>& log_target, RandomStream& rng,
                     int max_rs, bool second_test) {
  ArmsResult r;
  for (;;) {
    const double cand = prop.sample(rng);
    const double u = rng.uniform();
    const double lp = log_target(cand);
    const double lq = prop.log_envelope(cand);
    if (!arms_rs_pass(u, lp, lq)) {
      if (++r.rs_rejections > max_rs) throw NumericalError("arms: too many rejections");
      if (std::isfinite(lp) && !is_support_point(prop, cand)) prop = prop.with_point(cand, lp);
      continue;
    }
    const double lq_state = prop.log_envelope(state);
    const double alpha = arms_alpha(logp_state, lq_state, lp, lq);
    const double u2 = rng.uniform();
    double keep_out, keep_lp, keep_lq;  // the point not chosen
    if (u2 <= alpha && alpha > 0.0) {
      r.state = cand;
      r.log_density = lp;
      r.accepted = true;
      keep_out = state, keep_lp = logp_state, keep_lq = lq_state;
    } else {
      r.state = state;
      r.log_density = logp_state;
      keep_out = cand, keep_lp = lp, keep_lq = lq;
    }
    if (second_test) {
      const double u3 = rng.uniform();
      if (ia2rms_adds(u3, keep_lq, keep_lp) && !is_support_point(prop, keep_out)) {
        prop = prop.with_point(keep_out, keep_lp);
        r.added_aux = true;
      }
    }
    return r;
  }
}

}  // namespace

ArmsResult arms_step(double state, double logp_state, PiecewiseProposal& prop,
                     const std::function<double(double)>& log_target, RandomStream& rng,
                     int max_rs_rejections) {
  return arms_like(state, logp_state, prop, log_target, rng, max_rs_rejections, false);
}

ArmsResult ia2rms_step(double state, double logp_state, PiecewiseProposal& prop,
                       const std::function<double(double)>& log_target, RandomStream& rng,
                       int max_rs_rejections) {
  return arms_like(state, logp_state, prop, log_target, rng, max_rs_rejections, true);
}

// ---- FUSS --------------------------------------------------------------------

std::vector<std::size_t> fuss_prune(const std::vector<double>& grid,
                                    const std::vector<double>& lv, double delta,
                                    std::size_t K_keep) {
  const std::size_t G = grid.size();
  if (lv.size() != G) throw Error("fuss: grid and values differ in length");
  K_keep = std::max<std::size_t>(K_keep, 2);
  if (G < K_keep) throw Error("fuss: grid shorter than K_keep");
  for (std::size_t i = 1; i < G; ++i)
    if (!(grid[i] > grid[i - 1])) throw Error("fuss: grid must be strictly increasing");

  std::size_t imax = 0;
  for (std::size_t i = 1; i < G; ++i)
    if (lv[i] > lv[imax]) imax = i;
  const double vmax = lv[imax];
  if (vmax == kNegInf) throw NumericalError("fuss: target is zero on the whole grid");
  if (std::isnan(vmax) || vmax == kInf) throw NumericalError("fuss: invalid target values");

  if (delta <= 0.0) {
    std::vector<std::size_t> all(G);
    for (std::size_t i = 0; i < G; ++i) all[i] = i;
    return all;
  }

  std::vector<char> keep(G, 0);
  for (std::size_t k = 0; k < K_keep; ++k)
    keep[static_cast<std::size_t>(std::llround(static_cast<double>(k) * (G - 1) / (K_keep - 1)))] = 1;
  keep[imax] = 1;
  for (std::size_t i = 1; i + 1 < G; ++i)
    if (lv[i] > lv[i - 1] && lv[i] >= lv[i + 1]) keep[i] = 1;

  // Density relative to the peak.
  std::vector<double> e(G);
  for (std::size_t i = 0; i < G; ++i) e[i] = std::exp(lv[i] - vmax);

  // Between consecutive anchors there is no interior local maximum, so on any
  // sub-run both the density and its chord stay below the larger endpoint
  // value: runs with small endpoints need no scan.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  std::size_t prev = 0;
  for (std::size_t i = 1; i < G; ++i)
    if (keep[i]) {
      stack.push_back({prev, i});
      prev = i;
    }
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    if (b - a < 2) continue;
    if (std::max(e[a], e[b]) < delta) continue;
    double worst = -1.0;
    std::size_t arg = a;
    const double s = (e[b] - e[a]) / (grid[b] - grid[a]);
    for (std::size_t k = a + 1; k < b; ++k) {
      const double chord = e[a] + s * (grid[k] - grid[a]);
      const double err = std::fabs(e[k] - chord);
      if (err > worst) worst = err, arg = k;
    }
    if (worst >= delta) {
      keep[arg] = 1;
      stack.push_back({a, arg});
      stack.push_back({arg, b});
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < G; ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

LinearDensityProposal fuss_build_from_values(const std::vector<double>& grid,
                                             const std::vector<double>& log_values, double delta,
                                             std::size_t K_keep) {
  const auto idx = fuss_prune(grid, log_values, delta, K_keep);
  std::vector<double> p, v;
  p.reserve(idx.size());
  v.reserve(idx.size());
  for (auto i : idx) {
    p.push_back(grid[i]);
    v.push_back(log_values[i]);
  }
  return LinearDensityProposal(std::move(p), std::move(v));
}

LinearDensityProposal fuss_build(const std::vector<double>& grid,
                                 const std::function<double(double)>& log_target, double delta,
                                 std::size_t K_keep) {
  std::vector<double> lv;
  lv.reserve(grid.size());
  for (double x : grid) lv.push_back(log_target(x));
  return fuss_build_from_values(grid, lv, delta, K_keep);
}

namespace {

template <class Prop>
double independent_mh_1d(double state, const Prop& prop,
                         const std::function<double(double)>& log_target, int T_MH,
                         RandomStream& rng, int* accepted) {
  if (T_MH < 1) throw Error("piecewise_mh: T_MH must be at least 1");
  double x = state, lp = log_target(state), lq = prop.log_envelope(state);
  int acc = 0;
  for (int k = 0; k < T_MH; ++k) {
    const double y = prop.sample(rng);
    const double lpy = log_target(y), lqy = prop.log_envelope(y);
    const double num = lpy + lq, den = lp + lqy;
    double alpha;
    // A state where the proposal vanishes (or the target does) is left for
    // any candidate inside the target support.
    if (lq == kNegInf || lp == kNegInf) alpha = lpy > kNegInf ? 1.0 : 0.0;
    else if (num == kNegInf) alpha = 0.0;
    else if (den == kNegInf) alpha = 1.0;
    else alpha = std::min(1.0, std::exp(num - den));
    if (rng.uniform() <= alpha && alpha > 0.0) {
      x = y, lp = lpy, lq = lqy;
      ++acc;
    }
  }
  if (accepted) *accepted += acc;
  return x;
}

}  // namespace

double piecewise_mh(double state, const PiecewiseProposal& prop,
                    const std::function<double(double)>& log_target, int T_MH, RandomStream& rng,
                    int* accepted) {
  return independent_mh_1d(state, prop, log_target, T_MH, rng, accepted);
}

double piecewise_mh(double state, const LinearDensityProposal& prop,
                    const std::function<double(double)>& log_target, int T_MH, RandomStream& rng,
                    int* accepted) {
  return independent_mh_1d(state, prop, log_target, T_MH, rng, accepted);
}

// ---- Linear-density interpolant ------------------------------------------------

LinearDensityProposal::LinearDensityProposal(std::vector<double> p, std::vector<double> v)
    : support_(std::move(p)), values_(std::move(v)) {
  const std::size_t K = support_.size();
  if (K < 2 || values_.size() != K) throw Error("interpolant: need at least 2 points");
  for (std::size_t i = 0; i + 1 < K; ++i)
    if (!(support_[i + 1] > support_[i])) throw Error("interpolant: points must be strictly increasing");
  vmax_ = *std::max_element(values_.begin(), values_.end());
  if (vmax_ == kNegInf) throw NumericalError("interpolant: zero density at every point");
  if (std::isnan(vmax_) || vmax_ == kInf) throw NumericalError("interpolant: invalid values");
  e_.resize(K);
  for (std::size_t i = 0; i < K; ++i) e_[i] = std::exp(values_[i] - vmax_);
  cum_.resize(K - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < K; ++i) {
    total += 0.5 * (e_[i] + e_[i + 1]) * (support_[i + 1] - support_[i]);
    cum_[i] = total;
  }
  for (double& c : cum_) c /= total;
  cum_.back() = 1.0;
  log_total_ = vmax_ + std::log(total);
}

double LinearDensityProposal::log_envelope(double x) const {
  if (!(x >= support_.front() && x <= support_.back())) return kNegInf;
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(support_.begin(), support_.end(), x) - support_.begin());
  i = std::min(std::max<std::size_t>(i, 1), support_.size() - 1) - 1;
  const double h = support_[i + 1] - support_[i];
  const double f = e_[i] + (e_[i + 1] - e_[i]) * (x - support_[i]) / h;
  return f > 0.0 ? vmax_ + std::log(f) : kNegInf;
}

double LinearDensityProposal::sample(RandomStream& rng) const {
  const double u0 = rng.uniform();
  const std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), u0) - cum_.begin()),
      cum_.size() - 1);
  const double u = rng.uniform();
  const double a = e_[i], b = e_[i + 1], h = support_[i + 1] - support_[i];
  // Solve a s + (b - a) s^2 / 2 = u (a + b) / 2 for s in [0, 1].
  double s;
  if (std::fabs(b - a) <= 1e-12 * std::max(a, b)) {
    s = u;
  } else {
    const double disc = a * a + u * (b * b - a * a);
    s = (std::sqrt(std::max(disc, 0.0)) - a) / (b - a);
  }
  return support_[i] + std::clamp(s, 0.0, 1.0) * h;
}

std::vector<double> LinearDensityProposal::piece_probabilities() const {
  std::vector<double> p(cum_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < cum_.size(); ++i) {
    p[i] = cum_[i] - prev;
    prev = cum_[i];
  }
  return p;
}

}  // namespace mc
