#include <gtest/gtest.h>

#include <cmath>

#include "mc/bench/targets.hpp"
#include "mc/gradient.hpp"

using namespace mc;

namespace {

LogTarget std_normal(int d) {
  LogTarget t;
  t.dim = d;
  t.log_density = [](const Vec& x) { return -0.5 * x.squaredNorm(); };
  t.grad_log = [](const Vec& x) { return Vec(-x); };
  return t;
}

// Quartic well: log pi = -x^4 / 4 - x^2 / 2 per coordinate.
LogTarget quartic(int d) {
  LogTarget t;
  t.dim = d;
  t.log_density = [](const Vec& x) {
    return -(x.array().pow(4) / 4.0 + x.array().square() / 2.0).sum();
  };
  t.grad_log = [](const Vec& x) { return Vec(-(x.array().pow(3) + x.array())); };
  return t;
}

double harmonic_energy_error(double dtau, int L) {
  const LogTarget t = std_normal(1);
  const PhasePoint start{Vec::Constant(1, 1.0), Vec::Constant(1, 0.3)};
  const PhasePoint end = leapfrog(start, t.grad_log, dtau, L);
  return std::fabs(hamiltonian(end, t) - hamiltonian(start, t));
}

}  // namespace

TEST(Mala, ZeroGradientIsRandomWalk) {
  LogTarget t;
  t.dim = 2;
  t.log_density = [](const Vec& x) { return -std::fabs(x[0]) - std::fabs(x[1]); };
  t.grad_log = [](const Vec&) { return Vec(Vec::Zero(2)); };
  const double dt = 0.4;
  RandomStream r1(3), r2(3);
  Vec x = Vec::Zero(2);
  for (int i = 0; i < 200; ++i) {
    const MhResult a = mala_step(x, t, dt, r1);
    // same draws, symmetric rule
    const Vec cand = x + std::sqrt(dt) * r2.normal_vector(2);
    const double alpha = std::min(1.0, std::exp(t(cand) - t(x)));
    const bool acc = r2.uniform() <= alpha;
    ASSERT_NEAR(a.alpha, alpha, 1e-12);
    ASSERT_EQ(a.accepted, acc);
    x = a.state;
  }
}

TEST(Mala, DriftOnStandardNormal) {
  const LogTarget t = std_normal(3);
  const Vec x = Vec::LinSpaced(3, -1.0, 2.0);
  const GaussianParams g = mala_proposal(x, t, 0.3);
  EXPECT_LT((g.mean - (x - 0.15 * x)).norm(), 1e-15);
  EXPECT_LT((g.cov - 0.3 * Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(Mala, TunedAcceptanceOnTenDimensionalGaussian) {
  const LogTarget t = std_normal(10);
  RandomStream rng(4);
  const WarmupResult w =
      warmup_step_size(GradientSampler::mala, Vec::Zero(10), t, 0.5, 1, 0.574, 5000, rng);
  Vec x = w.state;
  double acc = 0.0;
  const int T = 20000;
  for (int i = 0; i < T; ++i) {
    const MhResult r = mala_step(x, t, w.dtau, rng);
    acc += r.accepted;
    x = r.state;
  }
  EXPECT_GE(acc / T, 0.45);
  EXPECT_LE(acc / T, 0.70);
}

TEST(Mala, NonFiniteGradientThrows) {
  LogTarget t = std_normal(1);
  t.grad_log = [](const Vec&) { return Vec(Vec::Constant(1, std::nan(""))); };
  RandomStream rng(1);
  EXPECT_THROW(mala_step(Vec::Zero(1), t, 0.1, rng), NumericalError);
  EXPECT_THROW(mala_step(Vec::Zero(1), std_normal(1), 0.0, rng), Error);
}

TEST(Leapfrog, TimeReversible) {
  const LogTarget t = quartic(3);
  RandomStream rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const PhasePoint s{rng.normal_vector(3), rng.normal_vector(3)};
    PhasePoint e = leapfrog(s, t.grad_log, 0.05, 25);
    e.p = -e.p;
    PhasePoint back = leapfrog(e, t.grad_log, 0.05, 25);
    EXPECT_LT((back.theta - s.theta).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((back.p + s.p).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Leapfrog, EnergyErrorIsSecondOrder) {
  const double e1 = harmonic_energy_error(0.1, 10);
  const double e2 = harmonic_energy_error(0.05, 20);
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
  // |dH| <= c dtau^2 with c fitted on the two smallest steps
  const double c = std::max(e1 / 0.01, e2 / 0.0025);
  for (double dt : {0.2, 0.1, 0.05, 0.025}) {
    const int L = static_cast<int>(std::lround(1.0 / dt));
    EXPECT_LE(harmonic_energy_error(dt, L), 1.05 * c * dt * dt) << dt;
  }
}

TEST(Leapfrog, ConvergesToAnalyticRotation) {
  const LogTarget t = std_normal(1);
  double prev = kInf;
  for (int L : {10, 20, 40, 80}) {
    const double dt = 1.0 / L;
    const PhasePoint e = leapfrog({Vec::Constant(1, 1.0), Vec::Constant(1, 0.0)}, t.grad_log, dt, L);
    const double err = std::hypot(e.theta[0] - std::cos(1.0), e.p[0] + std::sin(1.0));
    EXPECT_LT(err, prev / 3.5);
    prev = err;
  }
}

TEST(Leapfrog, ZeroGradientDriftsStraight) {
  GradFn zero = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  const PhasePoint s{Vec::Constant(2, 1.0), Vec::LinSpaced(2, -1.0, 0.5)};
  const PhasePoint e = leapfrog(s, zero, 0.25, 8);
  EXPECT_LT((e.theta - (s.theta + 8 * 0.25 * s.p)).norm(), 1e-14);
  EXPECT_EQ(e.p, s.p);
}

TEST(Leapfrog, VolumePreserving) {
  const LogTarget t = quartic(1);
  RandomStream rng(6);
  const double h = 1e-5;
  for (int rep = 0; rep < 20; ++rep) {
    const double th = rng.normal(), p = rng.normal();
    auto map = [&](double a, double b) {
      const PhasePoint e = leapfrog({Vec::Constant(1, a), Vec::Constant(1, b)}, t.grad_log, 0.1, 7);
      return std::pair<double, double>{e.theta[0], e.p[0]};
    };
    const auto ta = map(th + h, p), tb = map(th - h, p), pa = map(th, p + h), pb = map(th, p - h);
    const double j11 = (ta.first - tb.first) / (2 * h), j21 = (ta.second - tb.second) / (2 * h);
    const double j12 = (pa.first - pb.first) / (2 * h), j22 = (pa.second - pb.second) / (2 * h);
    EXPECT_NEAR(j11 * j22 - j12 * j21, 1.0, 1e-8);
  }
}

TEST(Leapfrog, RejectsBadSettings) {
  const LogTarget t = std_normal(1);
  EXPECT_THROW(leapfrog({Vec::Zero(1), Vec::Zero(1)}, t.grad_log, 0.1, 0), Error);
  GradFn blow = [](const Vec& x) { return Vec(1e308 * Vec::Ones(x.size())); };
  EXPECT_THROW(leapfrog({Vec::Zero(1), Vec::Ones(1)}, blow, 10.0, 5), NumericalError);
}

TEST(Hmc, OneStepProposalEqualsMala) {
  const LogTarget t = quartic(3);
  RandomStream rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Vec x = rng.normal_vector(3);
    const double dt = 0.3;
    // one leapfrog step of size dt gives MALA with step dt^2
    const GaussianParams h = hmc_one_step_proposal(x, t, dt);
    const GaussianParams m = mala_proposal(x, t, dt * dt);
    EXPECT_LT((h.mean - m.mean).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((h.cov - m.cov).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Hmc, ExactFlowConservesEnergy) {
  const LogTarget t = std_normal(2);
  RandomStream rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const PhasePoint s{rng.normal_vector(2), rng.normal_vector(2)};
    const double tau = rng.uniform(0, 6);
    PhasePoint e{s.theta * std::cos(tau) + s.p * std::sin(tau),
                 -s.theta * std::sin(tau) + s.p * std::cos(tau)};
    e.p = -e.p;
    const double alpha = std::min(1.0, std::exp(hamiltonian(s, t) - hamiltonian(e, t)));
    EXPECT_NEAR(alpha, 1.0, 1e-12);
  }
}

TEST(Hmc, TunedAcceptanceOnTwentyDimensionalGaussian) {
  const LogTarget t = std_normal(20);
  RandomStream rng(9);
  const int L = 10;
  const WarmupResult w =
      warmup_step_size(GradientSampler::hmc, Vec::Zero(20), t, 0.2, L, 0.651, 3000, rng);
  Vec x = w.state;
  double acc = 0.0;
  const int T = 5000;
  for (int i = 0; i < T; ++i) {
    const MhResult r = hmc_step(x, t, w.dtau, L, rng);
    acc += r.accepted;
    x = r.state;
  }
  EXPECT_NEAR(acc / T, 0.651, 0.08);
}

TEST(Gradient, BenchTargetsMatchFiniteDifferences) {
  std::vector<LogTarget> targets = {bench::target_gm1d(2), bench::target_gm1d(3),
                                    bench::target_gm1d(6), bench::target_gm2d5()};
  RandomStream rng(10);
  for (const LogTarget& t : targets) {
    ASSERT_TRUE(t.has_grad());
    for (int rep = 0; rep < 200; ++rep) {
      const Vec x = 8.0 * rng.normal_vector(t.dim);
      if (!std::isfinite(t(x)) || t(x) < -300) continue;
      const Vec g = t.grad_log(x), fd = finite_difference_grad(t, x);
      EXPECT_LE((g - fd).cwiseAbs().maxCoeff(), 1e-6) << x.transpose();
    }
  }
}
