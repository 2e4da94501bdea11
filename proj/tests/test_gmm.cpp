#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sra/errors.hpp"
#include "sra/gmm.hpp"

namespace {

using sra::GmmParams;
using sra::Matrix;
using sra::SuffStats;
using sra::Vector;

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

GmmParams symmetric_pair() { return GmmParams::univariate({0.5, 0.5}, {0.5, -0.5}, {0.1, 0.1}); }

GmmParams random_params(std::mt19937_64& gen, std::size_t K, std::size_t d) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.2, 1.0);
  Vector w(static_cast<Eigen::Index>(K));
  std::vector<Vector> mu;
  std::vector<Matrix> cov;
  for (std::size_t k = 0; k < K; ++k) {
    w[static_cast<Eigen::Index>(k)] = pos(gen);
    Vector m(static_cast<Eigen::Index>(d));
    for (auto& x : m) x = u(gen);
    mu.push_back(m);
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = 0.5 * u(gen);
    cov.push_back(a * a.transpose() + 0.3 * Matrix::Identity(a.rows(), a.cols()));
  }
  w /= w.sum();
  return GmmParams::create(w, mu, cov);
}

std::vector<double> weights_of(const GmmParams& p) { return {p.weights().data(), p.weights().data() + p.weights().size()}; }

}  // namespace

TEST(GmmParams, RejectsBadWeightsAndCovariances) {
  EXPECT_THROW(GmmParams::univariate({0.6, 0.6}, {0, 1}, {1, 1}), std::invalid_argument);
  EXPECT_THROW(GmmParams::univariate({-0.1, 1.1}, {0, 1}, {1, 1}), std::invalid_argument);
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(GmmParams::create(vec({1.0}), {vec({0, 0})}, {bad}), sra::SingularCovarianceError);
  Matrix asym(2, 2);
  asym << 1, 0.1, 0, 1;
  EXPECT_THROW(GmmParams::create(vec({1.0}), {vec({0, 0})}, {asym}), std::invalid_argument);
}

TEST(LogDensity, StandardNormalMode) {
  const auto p = GmmParams::univariate({1.0}, {0.0}, {1.0});
  EXPECT_NEAR(sra::log_density(p, vec({0.0})), -0.5 * std::log(2 * std::numbers::pi), 1e-15);
}

TEST(LogDensity, IsotropicBivariateMode) {
  const auto p = GmmParams::create(vec({1.0}), {vec({0, 0})}, {Matrix::Identity(2, 2)});
  EXPECT_NEAR(sra::log_density(p, vec({0, 0})), -std::log(2 * std::numbers::pi), 1e-15);
}

TEST(LogDensity, MatchesDirectSummationOnPaperPair) {
  const auto p = symmetric_pair();
  const double direct = std::log(oracle::mixture_pdf(weights_of(p), p.means(), p.covariances(), vec({0.5})));
  EXPECT_NEAR(sra::log_density(p, vec({0.5})), direct, 1e-10);
  EXPECT_NEAR(direct, 0.6904993792294276, 1e-12);
}

TEST(LogDensity, MatchesDirectSummationOnRandomParams) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t K = 1 + trial % 3, d = 1 + trial % 2;
    const auto p = random_params(gen, K, d);
    Vector y(static_cast<Eigen::Index>(d));
    for (auto& x : y) x = n(gen);
    const double direct = std::log(oracle::mixture_pdf(weights_of(p), p.means(), p.covariances(), y));
    EXPECT_NEAR(sra::log_density(p, y), direct, 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST(LogDensity, StableForLargeValues) {
  const auto p = GmmParams::univariate({0.5, 0.5}, {1e5, 2e5}, {10.0, 10.0});
  const double v = sra::log_density(p, vec({1.5e6}));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_LT(v, -1e8);
}

TEST(Responsibilities, SingleComponentIsOne) {
  const auto r = sra::responsibilities(GmmParams::univariate({1.0}, {3.0}, {2.0}), vec({-40.0}));
  ASSERT_EQ(r.size(), 1);
  EXPECT_EQ(r[0], 1.0);
}

TEST(Responsibilities, SymmetricPairAtOriginIsHalf) {
  const auto r = sra::responsibilities(GmmParams::univariate({0.5, 0.5}, {2.0, -2.0}, {0.7, 0.7}), vec({0.0}));
  EXPECT_DOUBLE_EQ(r[0], 0.5);
  EXPECT_DOUBLE_EQ(r[1], 0.5);
}

TEST(Responsibilities, MatchesBayesOracle) {
  const auto p = symmetric_pair();
  const auto r = sra::responsibilities(p, vec({0.4}));
  const auto b = oracle::bayes_posterior(weights_of(p), p.means(), p.covariances(), vec({0.4}));
  EXPECT_NEAR(r[0], b[0], 1e-15);
  EXPECT_NEAR(r[1], b[1], 1e-15);
  EXPECT_NEAR(r[1], 1.0 / (1.0 + std::exp(40.0)), 1e-30);
}

TEST(Responsibilities, SumToOneProperty) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_params(gen, 1 + trial % 3, 1 + trial % 3);
    Vector y(static_cast<Eigen::Index>(p.dim()));
    for (auto& x : y) x = n(gen);
    const Vector r = sra::responsibilities(p, y);
    EXPECT_NEAR(r.sum(), 1.0, 1e-12);
    EXPECT_GE(r.minCoeff(), 0.0);
  }
}

TEST(ExpectedSuffstats, SingleComponent) {
  const auto s = sra::expected_suffstats(GmmParams::univariate({1.0}, {0.0}, {1.0}), vec({2.0}));
  EXPECT_EQ(s.s0[0], 1.0);
  EXPECT_EQ(s.s1[0][0], 2.0);
  EXPECT_EQ(s.s2[0](0, 0), 4.0);
}

TEST(ExpectedSuffstats, SymmetricPairAtOrigin) {
  const auto s = sra::expected_suffstats(symmetric_pair(), vec({0.0}));
  EXPECT_DOUBLE_EQ(s.s0[0], 0.5);
  EXPECT_DOUBLE_EQ(s.s0[1], 0.5);
  EXPECT_EQ(s.s1[0][0], 0.0);
  EXPECT_EQ(s.s2[1](0, 0), 0.0);
}

TEST(ExpectedSuffstats, AsymmetricComposesBayesOracle) {
  const auto p = GmmParams::univariate({0.3, 0.7}, {0.5, -0.5}, {0.4, 0.2});
  const double y = 0.1;
  const auto s = sra::expected_suffstats(p, vec({y}));
  const auto b = oracle::bayes_posterior(weights_of(p), p.means(), p.covariances(), vec({y}));
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(s.s0[k], b[static_cast<std::size_t>(k)], 1e-14);
    EXPECT_NEAR(s.s1[static_cast<std::size_t>(k)][0], b[static_cast<std::size_t>(k)] * y, 1e-14);
    EXPECT_NEAR(s.s2[static_cast<std::size_t>(k)](0, 0), b[static_cast<std::size_t>(k)] * y * y, 1e-14);
  }
}

TEST(SuffStats, FlattenRoundTrip) {
  SuffStats s = SuffStats::zeros(2, 3);
  s.s0 << 0.25, 0.75;
  s.s1[0] << 1, 2, 3;
  s.s1[1] << 4, 5, 6;
  s.s2[0] << 1, 2, 3, 2, 5, 6, 3, 6, 9;
  s.s2[1] = 2 * s.s2[0];
  EXPECT_EQ(SuffStats::flat_size(2, 3), 2u + 6u + 12u);
  const Vector flat = s.flatten();
  ASSERT_EQ(static_cast<std::size_t>(flat.size()), SuffStats::flat_size(2, 3));
  EXPECT_EQ(flat[0], 0.25);
  EXPECT_EQ(flat[2], 1.0);
  EXPECT_EQ(flat[8], 1.0);   // s2_1(0,0)
  EXPECT_EQ(flat[9], 2.0);   // s2_1(0,1)
  EXPECT_EQ(flat[11], 5.0);  // s2_1(1,1)
  const SuffStats back = SuffStats::unflatten(flat, 2, 3);
  EXPECT_EQ(back.flatten(), flat);
  EXPECT_EQ(back.s2[1], s.s2[1]);
}

TEST(SuffStats, Validation) {
  SuffStats s = SuffStats::zeros(2, 1);
  s.s0 << 0.5, 0.4;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.s0 << 0.5, 0.5;
  EXPECT_NO_THROW(s.validate());
  s.s1[0] << 0.25;
  s.s2[0] << 0.13;
  EXPECT_TRUE(s.component_consistent(0));
  s.s2[0] << 0.1;
  EXPECT_FALSE(s.component_consistent(0));
  EXPECT_FALSE(SuffStats::zeros(1, 1).component_consistent(0));
}

TEST(MStep, MomentIdentities) {
  SuffStats s = SuffStats::zeros(1, 1);
  s.s0 << 1.0;
  s.s1[0] << 3.0;
  s.s2[0] << 10.0;
  const auto p = sra::m_step(s);
  EXPECT_EQ(p.mean(0)[0], 3.0);
  EXPECT_NEAR(p.covariance(0)(0, 0), 1.0, 1.0e-6 + 1e-15);
  sra::MStepOptions raw;
  raw.covariance_floor_scale = 0.0;
  EXPECT_DOUBLE_EQ(sra::m_step(s, raw).covariance(0)(0, 0), 1.0);
}

TEST(MStep, HandEvaluatedPair) {
  SuffStats s = SuffStats::zeros(2, 1);
  s.s0 << 0.5, 0.5;
  s.s1[0] << 0.25;
  s.s1[1] << -0.25;
  s.s2[0] << 0.13;
  s.s2[1] << 0.13;
  const auto p = sra::m_step(s);
  EXPECT_DOUBLE_EQ(p.weights()[0], 0.5);
  EXPECT_DOUBLE_EQ(p.mean(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(p.mean(1)[0], -0.5);
  EXPECT_NEAR(p.covariance(0)(0, 0), 0.01, 1e-8 + 1e-14);
  EXPECT_NEAR(p.covariance(1)(0, 0), 0.01, 1e-8 + 1e-14);
}

TEST(MStep, CovarianceFloorScalesWithTrace) {
  SuffStats s = SuffStats::zeros(1, 2);
  s.s0 << 1.0;
  s.s2[0] << 4.0, 0.0, 0.0, 0.0;  // rank deficient
  const auto p = sra::m_step(s);
  EXPECT_DOUBLE_EQ(p.covariance(0)(1, 1), 1e-6 * 4.0 / 2.0);
  EXPECT_DOUBLE_EQ(p.covariance(0)(0, 0), 4.0 + 2e-6);
}

TEST(MStep, DegenerateComponentCarriesIndex) {
  SuffStats s = SuffStats::zeros(3, 1);
  s.s0 << 0.5, 0.5, 1e-9;
  s.s2[0] << 1.0;
  s.s2[1] << 1.0;
  try {
    sra::m_step(s);
    FAIL() << "expected DegenerateComponentError";
  } catch (const sra::DegenerateComponentError& e) {
    EXPECT_EQ(e.component(), 2u);
  }
}

TEST(MStep, ZeroVarianceRaisesSingularCovariance) {
  SuffStats s = SuffStats::zeros(1, 1);
  s.s0 << 1.0;
  s.s1[0] << 2.0;
  s.s2[0] << 4.0;
  EXPECT_THROW(sra::m_step(s), sra::SingularCovarianceError);
}

TEST(MStep, PopulationIdempotence) {
  std::mt19937_64 gen(3);
  sra::MStepOptions raw;
  raw.covariance_floor_scale = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_params(gen, 1 + trial % 3, 1 + trial % 3);
    const auto q = sra::m_step(sra::population_stats(p), raw);
    for (std::size_t k = 0; k < p.components(); ++k) {
      EXPECT_NEAR(q.weights()[static_cast<Eigen::Index>(k)], p.weights()[static_cast<Eigen::Index>(k)], 1e-9);
      EXPECT_LE((q.mean(k) - p.mean(k)).norm(), 1e-9);
      EXPECT_LE((q.covariance(k) - p.covariance(k)).norm(), 1e-9);
    }
    const auto f = sra::m_step(sra::population_stats(p));
    for (std::size_t k = 0; k < p.components(); ++k) {
      EXPECT_LE((f.covariance(k) - p.covariance(k)).norm(), 1e-5 * p.covariance(k).trace());
    }
  }
}

TEST(MStep, MonteCarloRecoveryOfGeneratingParams) {
  const auto truth = GmmParams::univariate({0.4, 0.6}, {1.0, -1.0}, {0.3, 0.5});
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int N = 100000;
  SuffStats acc = SuffStats::zeros(2, 1);
  for (int i = 0; i < N; ++i) {
    const int k = u(gen) < 0.4 ? 0 : 1;
    const double y = truth.mean(static_cast<std::size_t>(k))[0] +
                     std::sqrt(truth.covariance(static_cast<std::size_t>(k))(0, 0)) * n(gen);
    const auto s = sra::expected_suffstats(truth, vec({y}));
    acc.s0 += s.s0 / N;
    for (int j = 0; j < 2; ++j) {
      acc.s1[static_cast<std::size_t>(j)] += s.s1[static_cast<std::size_t>(j)] / N;
      acc.s2[static_cast<std::size_t>(j)] += s.s2[static_cast<std::size_t>(j)] / N;
    }
  }
  const auto est = sra::m_step(acc);
  // Standard errors of a weight, a mean and a variance from N draws.
  const double se_w = std::sqrt(0.4 * 0.6 / N);
  EXPECT_NEAR(est.weights()[0], 0.4, 3 * se_w + 0.005);
  EXPECT_NEAR(est.mean(0)[0], 1.0, 3 * 0.3 / std::sqrt(0.4 * N) + 0.01);
  EXPECT_NEAR(est.mean(1)[0], -1.0, 3 * 0.5 / std::sqrt(0.6 * N) + 0.01);
  EXPECT_NEAR(est.covariance(0)(0, 0), 0.09, 3 * 0.09 * std::sqrt(2.0 / (0.4 * N)) + 0.005);
  EXPECT_NEAR(est.covariance(1)(0, 0), 0.25, 3 * 0.25 * std::sqrt(2.0 / (0.6 * N)) + 0.005);
}

TEST(Loss, SingleComponentClosedForm) {
  SuffStats s = SuffStats::zeros(1, 1);
  s.s0 << 1.0;
  s.s2[0] << 1.0;
  const auto p = GmmParams::univariate({1.0}, {0.0}, {1.0});
  EXPECT_NEAR(sra::loss(s, p), 0.5 * std::log(2 * std::numbers::pi) + 0.5, 1e-15);
}

TEST(Loss, MatchesDirectFormula) {
  SuffStats s = SuffStats::zeros(2, 1);
  s.s0 << 0.3, 0.7;
  s.s1[0] << 0.2;
  s.s1[1] << -0.5;
  s.s2[0] << 0.5;
  s.s2[1] << 1.1;
  const auto p = GmmParams::univariate({0.4, 0.6}, {0.1, -0.3}, {0.8, 1.2});
  EXPECT_NEAR(sra::loss(s, p), oracle::loss_1d({0.3, 0.7}, {0.2, -0.5}, {0.5, 1.1}, {0.4, 0.6}, {0.1, -0.3},
                                              {0.64, 1.44}),
              1e-13);
}

TEST(Loss, MStepIsArgminAgainstPerturbations) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n(0.0, 0.05);
  SuffStats s = sra::population_stats(GmmParams::univariate({0.3, 0.7}, {1.0, -1.0}, {0.5, 0.8}));
  sra::MStepOptions raw;
  raw.covariance_floor_scale = 0.0;
  const auto best = sra::m_step(s, raw);
  const double base = sra::loss(s, best);
  for (int trial = 0; trial < 100; ++trial) {
    double w0 = std::clamp(best.weights()[0] + n(gen), 0.01, 0.99);
    const auto other = GmmParams::univariate(
        {w0, 1 - w0}, {best.mean(0)[0] + n(gen), best.mean(1)[0] + n(gen)},
        {std::sqrt(best.covariance(0)(0, 0)) * std::exp(n(gen)), std::sqrt(best.covariance(1)(0, 0)) * std::exp(n(gen))});
    EXPECT_LE(base, sra::loss(s, other));
  }
}

TEST(Loss, FiniteDifferenceGradientVanishesAtMStep) {
  // Unconstrained parameterisation: softmax logits, means, log-Cholesky diagonal
  // plus lower off-diagonal.
  SuffStats s = SuffStats::zeros(2, 2);
  const auto gen_params = GmmParams::create(
      (Vector(2) << 0.35, 0.65).finished(), {vec({1.0, -0.5}), vec({-1.0, 0.3})},
      {(Matrix(2, 2) << 0.5, 0.1, 0.1, 0.3).finished(), (Matrix(2, 2) << 0.8, -0.2, -0.2, 0.6).finished()});
  s = sra::population_stats(gen_params);
  sra::MStepOptions raw;
  raw.covariance_floor_scale = 0.0;
  const auto opt = sra::m_step(s, raw);

  auto pack = [](const GmmParams& p) {
    std::vector<double> x;
    for (std::size_t k = 0; k < 2; ++k) x.push_back(std::log(p.weights()[static_cast<Eigen::Index>(k)]));
    for (std::size_t k = 0; k < 2; ++k) {
      x.push_back(p.mean(k)[0]);
      x.push_back(p.mean(k)[1]);
      const Matrix L = p.cholesky_factor(k);
      x.push_back(std::log(L(0, 0)));
      x.push_back(L(1, 0));
      x.push_back(std::log(L(1, 1)));
    }
    return x;
  };
  auto objective = [&](const std::vector<double>& x) {
    const double z = std::exp(x[0]) + std::exp(x[1]);
    std::vector<double> w{std::exp(x[0]) / z, std::exp(x[1]) / z};
    double value = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const std::size_t o = 2 + 5 * k;
      Vector mu = vec({x[o], x[o + 1]});
      Matrix L = Matrix::Zero(2, 2);
      L(0, 0) = std::exp(x[o + 2]);
      L(1, 0) = x[o + 3];
      L(1, 1) = std::exp(x[o + 4]);
      const Matrix cov = L * L.transpose();
      const Matrix inv = cov.inverse();
      const double occ = s.s0[static_cast<Eigen::Index>(k)];
      const Matrix scatter = s.s2[k] - s.s1[k] * mu.transpose() - mu * s.s1[k].transpose() + occ * mu * mu.transpose();
      value += -occ * std::log(w[k]) + 0.5 * occ * (2 * std::log(2 * std::numbers::pi) + std::log(cov.determinant())) +
               0.5 * (inv * scatter).trace();
    }
    return value;
  };
  const auto x0 = pack(opt);
  EXPECT_NEAR(objective(x0), sra::loss(s, opt), 1e-12);
  double grad_sq = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    auto xp = x0, xm = x0;
    xp[i] += h;
    xm[i] -= h;
    const double g = (objective(xp) - objective(xm)) / (2 * h);
    grad_sq += g * g;
  }
  EXPECT_LE(std::sqrt(grad_sq), 1e-6);
}

TEST(Loss, PriorShrinksCovarianceTowardScale) {
  SuffStats s = SuffStats::zeros(1, 1);
  s.s0 << 1.0;
  s.s2[0] << 4.0;
  sra::MStepOptions opts;
  opts.covariance_floor_scale = 0.0;
  opts.prior = sra::CovariancePrior{Matrix::Constant(1, 1, 2.0), 1.0};
  const auto p = sra::m_step(s, opts);
  EXPECT_DOUBLE_EQ(p.covariance(0)(0, 0), (4.0 + 2.0) / 2.0);
  // The penalised loss is stationary in the variance at that value.
  auto penalised = [&](double var) {
    return sra::loss(s, GmmParams::univariate({1.0}, {0.0}, {std::sqrt(var)}), &*opts.prior);
  };
  const double v = p.covariance(0)(0, 0);
  EXPECT_NEAR((penalised(v + 1e-5) - penalised(v - 1e-5)) / 2e-5, 0.0, 1e-8);
}
