#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mc/bench/targets.hpp"
#include "mc/dist.hpp"
#include "mc/is.hpp"
#include "stats.hpp"

using namespace mc;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

double phi(double x, double m = 0.0, double s = 1.0) { return std::exp(normal_log_pdf(x, m, s)); }

LogTarget scaled_normal(double Z, double m = 0.0, double s = 1.0) {
  LogTarget t;
  t.dim = 1;
  t.log_density = [=](const Vec& x) { return std::log(Z) + normal_log_pdf(x[0], m, s); };
  return t;
}

Proposal normal_q(double m, double s) { return gaussian_independent(v1(m), Mat::Identity(1, 1) * s * s); }

std::vector<Vec> draw(const Proposal& q, int n, RandomStream& rng) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(q.draw(rng));
  return pts;
}

ParticleSet from_weights(const std::vector<double>& w) {
  ParticleSet ps;
  for (std::size_t i = 0; i < w.size(); ++i) ps.add(v1(static_cast<double>(i)), std::log(w[i]));
  return ps;
}

auto ident = [](const Vec& x) { return x[0]; };
auto one = [](const Vec&) { return 1.0; };

}  // namespace

TEST(IsWeights, ProposalEqualToTargetGivesZ) {
  const LogTarget t = scaled_normal(2.5, 1.0, 2.0);
  const Proposal q = normal_q(1.0, 2.0);
  RandomStream rng(1);
  const ParticleSet ps = is_weights(draw(q, 100, rng), t, q);
  for (double w : ps.weights()) EXPECT_NEAR(w, 2.5, 1e-12);
}

TEST(IsWeights, ZeroTargetGivesZeroWeightAndOutsideSupportThrows) {
  LogTarget t;
  t.dim = 1;
  t.log_density = [](const Vec& x) { return x[0] > 0.5 ? kNegInf : 0.0; };
  const Proposal q = uniform_box(v1(0), v1(1));
  const ParticleSet ps = is_weights({v1(0.2), v1(0.7)}, t, q);
  EXPECT_EQ(ps.weights()[0], 1.0);
  EXPECT_EQ(ps.weights()[1], 0.0);
  EXPECT_THROW(is_weights({v1(1.5)}, t, q), Error);
}

TEST(IsWeights, UniformGridWeightsTrackTarget) {
  const LogTarget t = bench::target_gm1d(3);
  const Proposal q = uniform_box(v1(-20), v1(20));
  const std::vector<double> grid = linspace(-19.5, 19.5, 79);
  std::vector<Vec> pts;
  for (double x : grid) pts.push_back(v1(x));
  const ParticleSet ps = is_weights(pts, t, q);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(ps.weights()[i], 40.0 * std::exp(t(pts[i])), 1e-14);
}

TEST(Mis, SchemesAgreeForOneOrIdenticalProposals) {
  const LogTarget t = scaled_normal(1.0);
  RandomStream rng(2);
  const Proposal q = normal_q(0.5, 1.5);
  const std::vector<Vec> one_pt = {q.draw(rng)};
  const auto a = mis_weights(one_pt, t, {q}, MisScheme::smis).log_weights();
  const auto b = mis_weights(one_pt, t, {q}, MisScheme::dm).log_weights();
  EXPECT_NEAR(a[0], b[0], 1e-12);
  const std::vector<Proposal> qs(4, q);
  const std::vector<Vec> pts = draw(q, 4, rng);
  const auto c = mis_weights(pts, t, qs, MisScheme::smis).log_weights();
  const auto d = mis_weights(pts, t, qs, MisScheme::dm).log_weights();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(c[i], d[i], 1e-12);
  EXPECT_THROW(mis_weights(pts, t, {q, q}, MisScheme::dm), Error);
}

TEST(Mis, DeterministicMixtureReducesVariance) {
  LogTarget t;
  t.dim = 1;
  t.log_density = [](const Vec& x) {
    return std::log(0.5 * phi(x[0], -3.0) + 0.5 * phi(x[0], 3.0));
  };
  const std::vector<Proposal> qs = {normal_q(-2.0, 1.5), normal_q(2.5, 1.5)};
  RandomStream rng(3);
  std::vector<double> es, ed;
  for (int r = 0; r < 10000; ++r) {
    const std::vector<Vec> pts = {qs[0].draw(rng), qs[1].draw(rng)};
    es.push_back(unnormalized_estimate(mis_weights(pts, t, qs, MisScheme::smis), ident, 1.0));
    ed.push_back(unnormalized_estimate(mis_weights(pts, t, qs, MisScheme::dm), ident, 1.0));
  }
  auto var = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x / v.size();
    for (double x : v) s += (x - m) * (x - m) / (v.size() - 1);
    return s;
  };
  EXPECT_LE(var(ed), var(es));
}

TEST(Estimators, EqualWeightsReduceToPlainMean) {
  RandomStream rng(4);
  ParticleSet ps;
  std::vector<Vec> pts;
  for (int i = 0; i < 50; ++i) {
    pts.push_back(rng.normal_vector(1));
    ps.add(pts.back(), std::log(3.0));
  }
  auto g = [](const Vec& x) { return std::sin(x[0]) + x[0] * x[0]; };
  EXPECT_NEAR(unnormalized_estimate(ps, g, 3.0), mc_estimate(pts, g), 1e-12);
  EXPECT_NEAR(self_normalized_estimate(ps, g), mc_estimate(pts, g), 1e-12);
}

TEST(Estimators, ConstantFunction) {
  RandomStream rng(5);
  ParticleSet ps;
  for (int i = 0; i < 40; ++i) ps.add(rng.normal_vector(1), rng.normal());
  EXPECT_NEAR(self_normalized_estimate(ps, one), 1.0, 1e-12);
  EXPECT_NEAR(unnormalized_estimate(ps, one, 2.0), ps.z_hat() / 2.0, 1e-12);
  ParticleSet dead;
  dead.add(v1(0), kNegInf);
  EXPECT_THROW(self_normalized_estimate(dead, one), Error);
  EXPECT_THROW(unnormalized_estimate(ps, one, 0.0), Error);
}

TEST(Estimators, SelfNormalizedInvariantUnderRescaling) {
  RandomStream rng(6);
  ParticleSet a, b;
  for (int i = 0; i < 64; ++i) {
    const Vec x = rng.normal_vector(1);
    const double lw = rng.normal();
    a.add(x, lw);
    b.add(x, lw + 37.0);
  }
  auto g = [](const Vec& x) { return std::exp(x[0]); };
  EXPECT_NEAR(self_normalized_estimate(a, g), self_normalized_estimate(b, g), 1e-13);
}

TEST(Estimators, UnnormalizedUnbiasedOnBenchTargets) {
  struct Case {
    LogTarget t;
    Proposal q;
    double truth;
  };
  std::vector<Case> cases;
  for (int M : {2, 3, 6}) {
    double m = 0.0;
    for (double e : bench::gm1d_means(M)) m += e / M;
    cases.push_back({bench::target_gm1d(M), normal_q(0.0, 15.0), m});
  }
  cases.push_back({bench::target_gm2d5(), gaussian_independent(bench::gm2d5_mean(), 144.0 * Mat::Identity(2, 2)),
                   bench::gm2d5_mean()[0]});
  RandomStream rng(7);
  for (const Case& c : cases) {
    const int R = 4000;
    double s = 0, s2 = 0;
    for (int r = 0; r < R; ++r) {
      const double e = unnormalized_estimate(is_weights(draw(c.q, 25, rng), c.t, c.q), ident, 1.0);
      s += e;
      s2 += e * e;
    }
    const double m = s / R, sd = std::sqrt((s2 / R - m * m) / R);
    EXPECT_LE(std::fabs(m - c.truth), 3 * sd) << c.t.dim;
  }
}

TEST(Ess, Extremes) {
  const ParticleSet eq = from_weights({2, 2, 2, 2, 2});
  EXPECT_NEAR(ess_is(eq, EssVariant::inv_sum_sq), 5.0, 1e-12);
  EXPECT_NEAR(ess_is(eq, EssVariant::inv_max), 5.0, 1e-12);
  const ParticleSet single = from_weights({0, 0, 7, 0});
  EXPECT_NEAR(ess_is(single, EssVariant::inv_sum_sq), 1.0, 1e-12);
  EXPECT_NEAR(ess_is(single, EssVariant::inv_max), 1.0, 1e-12);
  const ParticleSet half = from_weights({0.5, 0.5, 0, 0});
  EXPECT_NEAR(ess_is(half, EssVariant::inv_sum_sq), 2.0, 1e-12);
  EXPECT_NEAR(ess_is(half, EssVariant::inv_max), 2.0, 1e-12);
  EXPECT_THROW(ess_is(from_weights({0, 0})), Error);
}

TEST(Ess, AlwaysWithinOneAndM) {
  RandomStream rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> lw;
    const int M = 1 + static_cast<int>(rng.index(30));
    for (int i = 0; i < M; ++i) lw.push_back(10.0 * rng.normal());
    for (EssVariant v : {EssVariant::inv_sum_sq, EssVariant::inv_max}) {
      const double e = ess_from_log_weights(lw, v);
      EXPECT_GE(e, 1.0 - 1e-12);
      EXPECT_LE(e, M + 1e-9);
    }
    // sum w^2 <= max w, so inv_sum_sq >= inv_max
    EXPECT_GE(ess_from_log_weights(lw, EssVariant::inv_sum_sq) + 1e-9,
              ess_from_log_weights(lw, EssVariant::inv_max));
  }
}

TEST(Ess, HeavyWeightFlag) {
  EXPECT_TRUE(heavy_weight_flag(from_weights({1000, 1, 1e-3})));
  EXPECT_FALSE(heavy_weight_flag(from_weights({1, 1, 1})));
}

TEST(Resample, SingleParticle) {
  ParticleSet ps;
  ps.add(v1(4.0), std::log(0.3));
  RandomStream rng(9);
  const ProperSample s = resample_one(ps, rng);
  EXPECT_EQ(s.point[0], 4.0);
  EXPECT_NEAR(s.weight(), 0.3, 1e-15);
}

TEST(Resample, ProperWeightingOnDiscreteTarget) {
  // pi(i) = Z pbar_i with Z = 2, q uniform on three states, M = 2
  const std::vector<double> pbar = {0.2, 0.5, 0.3}, qp = {1 / 3.0, 1 / 3.0, 1 / 3.0};
  const double Z = 2.0;
  auto g = [](double x) { return x * x + 1.0; };
  double exact = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double wa = Z * pbar[a] / qp[a], wb = Z * pbar[b] / qp[b];
      const double rho = 0.5 * (wa + wb);
      exact += qp[a] * qp[b] * rho * (wa / (wa + wb) * g(a) + wb / (wa + wb) * g(b));
    }
  double eg = 0.0;
  for (int i = 0; i < 3; ++i) eg += pbar[i] * g(i);
  EXPECT_NEAR(exact, Z * eg, 1e-12);

  LogTarget t;
  t.dim = 1;
  t.log_density = [&](const Vec& x) { return std::log(Z * pbar[static_cast<int>(x[0])]); };
  const Proposal q = discrete_independent(qp);
  RandomStream rng(10);
  const int R = 100000;
  double s = 0, s2 = 0;
  for (int r = 0; r < R; ++r) {
    const ProperSample p = resample_one(is_weights(draw(q, 2, rng), t, q), rng);
    const double v = p.weight() * g(p.point[0]);
    s += v;
    s2 += v * v;
  }
  const double m = s / R, sd = std::sqrt((s2 / R - m * m) / R);
  EXPECT_LE(std::fabs(m - exact), 4 * sd);
}

TEST(Resample, SelectionFrequenciesFollowWeights) {
  const ParticleSet ps = from_weights({1, 4, 2, 3});
  RandomStream rng(11);
  std::vector<double> c(4, 0.0);
  for (int i = 0; i < 100000; ++i) c[static_cast<int>(resample_one(ps, rng).point[0])] += 1;
  EXPECT_GT(stats::chi2_pvalue(c, {0.1, 0.4, 0.2, 0.3}), 0.001);
  EXPECT_THROW(resample_one(from_weights({0, 0}), rng), Error);
}

TEST(Group, SingleGroupReturnsResampledPoint) {
  RandomStream rng(12);
  ParticleSet ps;
  for (int i = 0; i < 5; ++i) ps.add(rng.normal_vector(1), rng.normal());
  const auto s = group_summarize({ps}, rng);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].size, 5u);
  EXPECT_NEAR(s[0].weight(), 5.0 * ps.z_hat(), 1e-12);
  auto g = [](const Vec& x) { return std::cos(x[0]); };
  EXPECT_NEAR(group_estimate(s, g), g(s[0].point), 1e-14);
  EXPECT_THROW(group_summarize({ParticleSet{}}, rng), Error);
}

TEST(Group, MatchesPooledSelfNormalizedEstimate) {
  const LogTarget t = scaled_normal(1.0, 1.0, 1.0);
  const Proposal q = normal_q(0.0, 2.0);
  RandomStream rng(13);
  const int R = 10000;
  double s = 0, s2 = 0;
  for (int r = 0; r < R; ++r) {
    std::vector<ParticleSet> groups;
    ParticleSet pooled;
    for (int l = 0; l < 4; ++l) {
      groups.push_back(is_weights(draw(q, 10, rng), t, q));
      for (const auto& p : groups.back().samples()) pooled.add(p.point, p.log_weight);
    }
    const double d = group_estimate(group_summarize(groups, rng), ident) -
                     self_normalized_estimate(pooled, ident);
    s += d;
    s2 += d * d;
  }
  const double m = s / R, sd = std::sqrt((s2 / R - m * m) / R);
  EXPECT_LE(std::fabs(m), 3 * sd);
}

TEST(Group, ZeroContributionGroupStillWeighted) {
  ParticleSet a, b, dead;
  a.add(v1(0.0), std::log(1.0));
  a.add(v1(0.0), std::log(3.0));  // M Z = 4, g = 0
  b.add(v1(1.0), std::log(6.0));  // M Z = 6, g = 1
  dead.add(v1(5.0), kNegInf);
  RandomStream rng(14);
  const auto s = group_summarize({a, b, dead}, rng);
  EXPECT_NEAR(group_estimate(s, ident), 0.6, 1e-14);
  EXPECT_EQ(s[2].weight(), 0.0);
}

TEST(Pearson, ZeroForIdenticalDensities) {
  const auto grid = linspace(-10, 10, 2001);
  auto p = [](double x) { return phi(x, 0.3, 1.2); };
  EXPECT_NEAR(pearson_chi2_1d(p, p, grid), 0.0, 1e-15);
}

TEST(Pearson, MatchesClosedFormForGaussians) {
  const auto grid = linspace(-30, 30, 60001);
  for (double s : {0.9, 1.5, 2.0, 3.0}) {
    const double exact = s / std::sqrt(2.0 - 1.0 / (s * s)) - 1.0;
    const double v = pearson_chi2_1d([](double x) { return phi(x); }, [=](double x) { return phi(x, 0, s); }, grid);
    EXPECT_NEAR(v, exact, 1e-4) << s;
  }
  EXPECT_THROW(pearson_chi2_1d([](double x) { return phi(x); }, [](double x) { return x > 0 ? 1.0 : 0.0; },
                               linspace(-1, 1, 11)),
               Error);
}

TEST(Pearson, WeightVarianceIsZSquaredChi2) {
  const double Z = 3.0, s = 2.0;
  const double chi2 = s / std::sqrt(2.0 - 1.0 / (s * s)) - 1.0;
  const LogTarget t = scaled_normal(Z);
  const Proposal q = normal_q(0.0, s);
  RandomStream rng(15);
  const ParticleSet ps = is_weights(draw(q, 1000000, rng), t, q);
  double m = 0, m2 = 0;
  const auto w = ps.weights();
  for (double v : w) m += v / w.size();
  for (double v : w) m2 += (v - m) * (v - m) / (w.size() - 1);
  EXPECT_NEAR(m2 / (Z * Z) / chi2, 1.0, 0.1);
}

TEST(OptimalProposal, ConstantGGivesTarget) {
  const auto grid = linspace(-8, 8, 1601);
  const auto f = optimal_proposal_density_1d([](double x) { return phi(x); }, [](double) { return 1.0; }, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(f[i], phi(grid[i]), 1e-9);
  EXPECT_THROW(optimal_proposal_density_1d([](double x) { return phi(x); }, [](double) { return 0.0; }, grid),
               Error);
}

TEST(OptimalProposal, SignOfGIgnored) {
  const auto grid = linspace(-8, 8, 801);
  auto p = [](double x) { return phi(x); };
  const auto a = optimal_proposal_density_1d(p, [](double x) { return x; }, grid);
  const auto b = optimal_proposal_density_1d(p, [](double x) { return std::fabs(x); }, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(OptimalProposal, BeatsTargetAsProposalForSecondMoment) {
  const auto grid = linspace(-10, 10, 4001);
  auto g = [](double x) { return x * x; };
  const auto f = optimal_proposal_density_1d([](double x) { return phi(x); }, g, grid);
  // |g| pi = x^2 phi(x) already integrates to one
  for (std::size_t i = 0; i < grid.size(); ++i) ASSERT_NEAR(f[i], g(grid[i]) * phi(grid[i]), 1e-6);

  LogTarget t = scaled_normal(1.0);
  Proposal qopt;
  // x^2 phi(x) is a chi-3 radius with a random sign
  qopt.sample = [](RandomStream& rng, const Vec*) {
    const double r = rng.normal_vector(3).norm();
    return v1(rng.uniform() < 0.5 ? -r : r);
  };
  qopt.log_density = [](const Vec& x, const Vec*) { return 2.0 * std::log(std::fabs(x[0])) + normal_log_pdf(x[0], 0, 1); };
  const Proposal qpi = normal_q(0.0, 1.0);
  auto g2 = [](const Vec& x) { return x[0] * x[0]; };
  RandomStream rng(16);
  std::vector<double> eo, ep;
  for (int r = 0; r < 10000; ++r) {
    eo.push_back(unnormalized_estimate(is_weights(draw(qopt, 10, rng), t, qopt), g2, 1.0));
    ep.push_back(unnormalized_estimate(is_weights(draw(qpi, 10, rng), t, qpi), g2, 1.0));
  }
  auto var = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x / v.size();
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
  };
  EXPECT_LT(var(eo), var(ep));
  EXPECT_LT(var(eo), 1e-20);
}

TEST(Quadrature, TrapezoidAndLinspace) {
  const auto x = linspace(0, 1, 11);
  EXPECT_EQ(x.size(), 11u);
  EXPECT_DOUBLE_EQ(x.front(), 0.0);
  EXPECT_DOUBLE_EQ(x.back(), 1.0);
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  EXPECT_NEAR(trapezoid(x, y), 2.0, 1e-14);
}

TEST(ParticleCsv, HeaderAndRows) {
  ParticleSet ps;
  ps.add(Vec::Constant(2, 1.5), std::log(2.0));
  ps.add(Vec::Constant(2, -1.0), kNegInf);
  std::ostringstream os;
  write_particles_csv(ps, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x0,x1,weight");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("1.5,1.5,2", 0), 0u);
  std::getline(is, line);
  EXPECT_EQ(line.rfind("-1,-1,0", 0), 0u);
}
