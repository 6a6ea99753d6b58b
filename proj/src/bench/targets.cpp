#include "mc/bench/targets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mc/dist.hpp"

namespace mc::bench {

namespace {

constexpr double kLogisticPriorHi = 1e4;

// Equal-weight Gaussian mixture with its gradient.
LogTarget mixture_target(std::vector<Gaussian> comps) {
  auto c = std::make_shared<std::vector<Gaussian>>(std::move(comps));
  const double log_w = -std::log(static_cast<double>(c->size()));
  LogTarget t;
  t.dim = (*c)[0].dim();
  t.log_density = [c, log_w](const Vec& x) {
    std::vector<double> lv;
    lv.reserve(c->size());
    for (const auto& g : *c) lv.push_back(log_w + g.log_pdf(x));
    return log_sum_exp(lv);
  };
  t.grad_log = [c, log_w](const Vec& x) {
    std::vector<double> lv;
    for (const auto& g : *c) lv.push_back(log_w + g.log_pdf(x));
    const double lse = log_sum_exp(lv);
    Vec grad = Vec::Zero(x.size());
    for (std::size_t i = 0; i < c->size(); ++i) {
      const auto& g = (*c)[i];
      grad -= std::exp(lv[i] - lse) * g.cov().ldlt().solve(x - g.mean());
    }
    return grad;
  };
  return t;
}

}  // namespace

std::vector<double> gm1d_means(int M) {
  switch (M) {
    case 2: return {-10.0, 10.0};
    case 3: return {-10.0, 0.0, 10.0};
    case 6: return {-15.0, -10.0, -5.0, 5.0, 10.0, 15.0};
    default: throw Error("gm1d: unsupported number of modes " + std::to_string(M));
  }
}

LogTarget target_gm1d(int M) {
  std::vector<Gaussian> comps;
  for (double m : gm1d_means(M))
    comps.emplace_back(Vec::Constant(1, m), Mat::Constant(1, 1, kGm1dVariance));
  return mixture_target(std::move(comps));
}

std::vector<Gm2dComponent> gm2d5_components() {
  auto cov = [](double a, double b, double d) {
    Mat c(2, 2);
    c << a, b, b, d;
    return c;
  };
  auto vec = [](double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
  };
  return {
      {vec(-10, -10), cov(2, 0.6, 1)},
      {vec(0, 16), cov(2, -0.4, 2)},
      {vec(13, 8), cov(2, 0.8, 2)},
      {vec(-9, 7), cov(3, 0, 0.5)},
      {vec(14, -14), cov(2, -0.1, 2)},
  };
}

LogTarget target_gm2d5() {
  std::vector<Gaussian> comps;
  for (const auto& c : gm2d5_components()) comps.emplace_back(c.mean, c.cov);
  return mixture_target(std::move(comps));
}

Vec gm2d5_mean() {
  Vec m = Vec::Zero(2);
  const auto comps = gm2d5_components();
  for (const auto& c : comps) m += c.mean;
  return m / static_cast<double>(comps.size());
}

// ---- logistic map ---------------------------------------------------------

Vec logistic_generate(double R, double Omega, double lambda, int T, RandomStream& rng) {
  if (T < 2 || !(R > 0.0) || !(Omega > 0.0) || !(lambda > 0.0))
    throw Error("logistic: invalid generator settings");
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec z(T);
    z[0] = rng.uniform() * std::min(1.0, Omega);
    bool ok = z[0] > 0.0;
    for (int t = 0; ok && t + 1 < T; ++t) {
      z[t + 1] = R * z[t] * (1.0 - z[t] / Omega) * std::exp(lambda * rng.normal());
      ok = z[t + 1] > 0.0 && (t + 2 == T || z[t + 1] < Omega);
    }
    if (ok) return z;
  }
  throw Error("logistic: could not generate a valid sequence");
}

LogisticPosterior::LogisticPosterior(const Vec& z, double lambda) : lambda_(lambda) {
  if (z.size() < 2) throw Error("logistic: need at least two observations");
  if (!(lambda > 0.0)) throw Error("logistic: lambda must be positive");
  for (Eigen::Index t = 0; t < z.size(); ++t)
    if (!(z[t] > 0.0) || !std::isfinite(z[t])) throw Error("logistic: invalid observation sequence");
  for (Eigen::Index t = 0; t + 1 < z.size(); ++t) {
    z_.push_back(z[t]);
    b_.push_back(std::log(z[t + 1]) - std::log(z[t]));
    sum_b_ += b_.back();
    zmax_ = std::max(zmax_, z[t]);
  }
}

LogisticPosterior::Sums LogisticPosterior::sums(double Omega) const {
  Sums s{0.0, 0.0};
  if (!(Omega > zmax_)) return {kNegInf, kInf};
  for (std::size_t t = 0; t < z_.size(); ++t) {
    const double l = std::log1p(-z_[t] / Omega);
    s.S1 += l;
    s.S2 += (b_[t] - l) * (b_[t] - l);
  }
  return s;
}

double LogisticPosterior::log_from_sums(double r, const Sums& s) const {
  if (s.S1 == kNegInf) return kNegInf;
  const double n = static_cast<double>(z_.size());
  const double quad = s.S2 - 2.0 * r * (sum_b_ - s.S1) + n * r * r;
  return n * r + s.S1 - quad / (2.0 * lambda_ * lambda_);
}

double LogisticPosterior::log_joint(double R, double Omega) const {
  if (!(R > 0.0) || R > kLogisticPriorHi || !(Omega > 0.0) || Omega > kLogisticPriorHi)
    return kNegInf;
  return log_from_sums(std::log(R), sums(Omega));
}

double LogisticPosterior::log_cond_R(double R, double Omega) const { return log_joint(R, Omega); }
double LogisticPosterior::log_cond_Omega(double Omega, double R) const {
  return log_joint(R, Omega);
}

void LogisticPosterior::tabulate_omega(const std::vector<double>& grid) {
  grid_ = grid;
  grid_sums_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid_sums_[i] = sums(grid[i]);
}

std::vector<double> LogisticPosterior::log_cond_Omega_on_grid(double R) const {
  if (grid_.empty()) throw Error("logistic: omega grid not tabulated");
  std::vector<double> out(grid_.size(), kNegInf);
  if (!(R > 0.0)) return out;
  const double r = std::log(R);
  for (std::size_t i = 0; i < grid_.size(); ++i)
    if (grid_[i] > 0.0 && grid_[i] <= kLogisticPriorHi) out[i] = log_from_sums(r, grid_sums_[i]);
  return out;
}

std::vector<double> LogisticPosterior::log_cond_R_on_grid(const std::vector<double>& grid,
                                                          double Omega) const {
  const Sums s = sums(Omega);
  std::vector<double> out(grid.size(), kNegInf);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > 0.0 && grid[i] <= kLogisticPriorHi) out[i] = log_from_sums(std::log(grid[i]), s);
  return out;
}

Vec LogisticPosterior::posterior_mean(double omega_hi, std::size_t n) const {
  // With r = log R the integrand exp(f(r) + r) is Gaussian in r:
  // -a r^2 / 2 + b r + c0.
  const double m = static_cast<double>(z_.size());
  const double l2 = lambda_ * lambda_;
  const double a = m / l2;
  const double u_lo = std::log(1e-12 * std::max(zmax_, 1e-12));
  const double u_hi = std::log(omega_hi - zmax_);
  std::vector<double> log_w(n), er(n), om(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / (n - 1);
    const double d = std::exp(u);
    om[i] = zmax_ + d;
    const Sums s = sums(om[i]);
    const double b = m + 1.0 + (sum_b_ - s.S1) / l2;
    const double c0 = s.S1 - s.S2 / (2.0 * l2);
    log_w[i] = c0 + b * b / (2.0 * a) + u;  // dOmega = d du
    er[i] = std::exp(b / a + 0.5 / a);
  }
  const double mx = *std::max_element(log_w.begin(), log_w.end());
  double z = 0.0, sr = 0.0, so = 0.0;
  const double du = (u_hi - u_lo) / (n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(log_w[i] - mx) * ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * du;
    z += w;
    sr += w * er[i];
    so += w * om[i];
  }
  Vec out(2);
  out << sr / z, so / z;
  return out;
}

LogTarget target_logistic_map(const Vec& z_obs, double lambda) {
  auto post = std::make_shared<LogisticPosterior>(z_obs, lambda);
  LogTarget t;
  t.dim = 2;
  t.log_density = [post](const Vec& x) { return post->log_joint(x[0], x[1]); };
  return t;
}

// ---- sensor network -------------------------------------------------------

Mat wsn_sensor_positions() {
  Mat h(kWsnSensors, 2);
  h << 3, -8, 8, 10, -4, -6, -8, 1, 10, 0, 0, 10;
  return h;
}

Vec wsn_truth() {
  Vec v(2 + kWsnSensors);
  v << 2.5, 2.5, 1, 2, 1, 0.5, 3, 0.2;
  return v;
}

Mat wsn_generate(const Vec& truth, int n_obs, RandomStream& rng) {
  if (truth.size() != 2 + kWsnSensors) throw Error("wsn: truth must have dimension 8");
  const Mat h = wsn_sensor_positions();
  const Vec z = truth.head(2);
  Mat Y(n_obs, kWsnSensors);
  for (int k = 0; k < n_obs; ++k)
    for (int j = 0; j < kWsnSensors; ++j) {
      const double d = (z - h.row(j).transpose()).norm();
      Y(k, j) = 20.0 * std::log10(d) + truth[2 + j] * rng.normal();
    }
  return Y;
}

LogTarget target_wsn(const Mat& Y) {
  if (Y.cols() != kWsnSensors || Y.rows() < 1) throw Error("wsn: observation matrix must be N_O x 6");
  const Mat h = wsn_sensor_positions();
  const double n_obs = static_cast<double>(Y.rows());
  // Per sensor: sum_k y and sum_k y^2, so the likelihood is O(1) in N_O.
  Vec s1 = Y.colwise().sum().transpose();
  Vec s2 = Y.array().square().colwise().sum().transpose();
  LogTarget t;
  t.dim = 2 + kWsnSensors;
  t.log_density = [h, n_obs, s1, s2](const Vec& x) {
    if (std::abs(x[0]) > 30.0 || std::abs(x[1]) > 30.0) return kNegInf;
    double lp = 0.0;
    for (int j = 0; j < kWsnSensors; ++j) {
      const double lam = x[2 + j];
      if (!(lam > 0.0) || lam > 20.0) return kNegInf;
      const double d = std::hypot(x[0] - h(j, 0), x[1] - h(j, 1));
      if (!(d > 0.0)) return kNegInf;
      const double mu = 20.0 * std::log10(d);
      const double ss = s2[j] - 2.0 * mu * s1[j] + n_obs * mu * mu;
      lp += -n_obs * (std::log(lam) + 0.5 * kLog2Pi) - ss / (2.0 * lam * lam);
    }
    return lp;
  };
  return t;
}

// ---- spectral analysis ----------------------------------------------------

Vec spectral_generate(const Vec& f, int L, double sigma_w, RandomStream& rng) {
  if (L < 1 || !(sigma_w > 0.0)) throw Error("spectral: invalid generator settings");
  Vec y(L);
  for (int k = 1; k <= L; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) s += std::cos(2.0 * M_PI * f[i] * k);
    y[k - 1] = s + sigma_w * rng.normal();
  }
  return y;
}

double spectral_potential(const Vec& theta, const Vec& y, double sigma_w) {
  double v = 0.0;
  for (Eigen::Index k = 1; k <= y.size(); ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) s += std::cos(2.0 * M_PI * theta[i] * k);
    const double e = y[k - 1] - s;
    v += e * e;
  }
  return v / (2.0 * sigma_w * sigma_w);
}

LogTarget target_spectral(const Vec& y, double sigma_w, int dim) {
  if (!(sigma_w > 0.0) || dim < 1) throw Error("spectral: invalid settings");
  LogTarget t;
  t.dim = dim;
  t.log_density = [y, sigma_w](const Vec& th) {
    for (Eigen::Index i = 0; i < th.size(); ++i)
      if (th[i] < 0.0 || th[i] > 0.5) return kNegInf;
    return -spectral_potential(th, y, sigma_w);
  };
  return t;
}

}  // namespace mc::bench
