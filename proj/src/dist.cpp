#include "mc/dist.hpp"

#include <cmath>
#include <memory>

namespace mc {

double normal_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * (kLog2Pi + z * z) - std::log(sd);
}

Gaussian::Gaussian(Vec mean, const Mat& cov) : mean_(std::move(mean)), cov_(cov) {
  if (cov.rows() != mean_.size() || cov.cols() != mean_.size())
    throw Error("Gaussian: covariance shape mismatch");
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("Gaussian: covariance not positive definite");
  chol_ = llt.matrixL();
  log_norm_ = -0.5 * dim() * kLog2Pi - chol_.diagonal().array().log().sum();
}

double Gaussian::log_pdf(const Vec& x) const { return log_pdf(x, mean_); }

double Gaussian::log_pdf(const Vec& x, const Vec& m) const {
  Vec z = chol_.triangularView<Eigen::Lower>().solve(x - m);
  return log_norm_ - 0.5 * z.squaredNorm();
}

Vec Gaussian::sample(RandomStream& rng) const { return sample(rng, mean_); }

Vec Gaussian::sample(RandomStream& rng, const Vec& m) const {
  return m + chol_ * rng.normal_vector(dim());
}

Proposal gaussian_random_walk(const Mat& cov) {
  auto g = std::make_shared<Gaussian>(Vec::Zero(cov.rows()), cov);
  Proposal p;
  p.dim = static_cast<int>(cov.rows());
  p.symmetric = true;
  p.sample = [g](RandomStream& rng, const Vec* c) {
    if (!c) throw Error("random walk proposal needs a current state");
    return g->sample(rng, *c);
  };
  p.log_density = [g](const Vec& x, const Vec* c) {
    if (!c) throw Error("random walk proposal needs a current state");
    return g->log_pdf(x, *c);
  };
  return p;
}

Proposal gaussian_random_walk(int dim, double sigma) {
  return gaussian_random_walk(Mat::Identity(dim, dim) * sigma * sigma);
}

Proposal gaussian_independent(const Vec& mean, const Mat& cov) {
  auto g = std::make_shared<Gaussian>(mean, cov);
  Proposal p;
  p.dim = static_cast<int>(mean.size());
  p.sample = [g](RandomStream& rng, const Vec*) { return g->sample(rng); };
  p.log_density = [g](const Vec& x, const Vec*) { return g->log_pdf(x); };
  return p;
}

Proposal uniform_box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size() || ((hi - lo).array() <= 0.0).any())
    throw Error("uniform_box: invalid bounds");
  const double log_vol = -(hi - lo).array().log().sum();
  Proposal p;
  p.dim = static_cast<int>(lo.size());
  p.sample = [lo, hi](RandomStream& rng, const Vec*) {
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    return x;
  };
  p.log_density = [lo, hi, log_vol](const Vec& x, const Vec*) {
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return kNegInf;
    return log_vol;
  };
  return p;
}

namespace {

int state_of(const Vec& x, int K) {
  const double r = std::round(x[0]);
  if (r < 0 || r >= K || r != x[0]) return -1;
  return static_cast<int>(r);
}

Vec point(int i) { return Vec::Constant(1, static_cast<double>(i)); }

}  // namespace

LogTarget discrete_target(const std::vector<double>& probs) {
  LogTarget t;
  t.dim = 1;
  const int K = static_cast<int>(probs.size());
  t.log_density = [probs, K](const Vec& x) {
    const int i = state_of(x, K);
    return i < 0 || probs[i] <= 0.0 ? kNegInf : std::log(probs[i]);
  };
  return t;
}

Proposal discrete_proposal(const Mat& Q) {
  const int K = static_cast<int>(Q.rows());
  Proposal p;
  p.dim = 1;
  p.symmetric = Q.isApprox(Q.transpose(), 0.0);
  p.sample = [Q, K](RandomStream& rng, const Vec* c) {
    if (!c) throw Error("discrete proposal needs a current state");
    const int i = state_of(*c, K);
    std::vector<double> row(Q.cols());
    for (int j = 0; j < Q.cols(); ++j) row[j] = Q(i, j);
    return point(static_cast<int>(rng.categorical(row)));
  };
  p.log_density = [Q, K](const Vec& x, const Vec* c) {
    if (!c) throw Error("discrete proposal needs a current state");
    const int i = state_of(*c, K), j = state_of(x, K);
    if (i < 0 || j < 0 || Q(i, j) <= 0.0) return kNegInf;
    return std::log(Q(i, j));
  };
  return p;
}

Proposal discrete_independent(const std::vector<double>& probs) {
  const int K = static_cast<int>(probs.size());
  Proposal p;
  p.dim = 1;
  p.sample = [probs](RandomStream& rng, const Vec*) {
    return point(static_cast<int>(rng.categorical(probs)));
  };
  p.log_density = [probs, K](const Vec& x, const Vec*) {
    const int j = state_of(x, K);
    return j < 0 || probs[j] <= 0.0 ? kNegInf : std::log(probs[j]);
  };
  return p;
}

}  // namespace mc
