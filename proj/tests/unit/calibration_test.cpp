#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wdro/calibration/calibration.hpp"
#include "wdro/errors.hpp"
#include "wdro/transport/ot.hpp"

namespace {

using namespace wdro::calibration;
using wdro::transport::DiscreteDistribution;
using wdro::transport::Point;

ConcentrationParams params(double d, double p, double a, double c1 = 1.0, double c2 = 1.0) {
  ConcentrationParams cp;
  cp.d = d;
  cp.p = p;
  cp.a = a;
  cp.c1 = c1;
  cp.c2 = c2;
  return cp;
}

TEST(Beta, DirectFormula) {
  // d = 4, p = 2 sits on the excluded p = d/2 case; d = 3 has the same
  // exponent max{d/p, 2} = 2.
  EXPECT_THROW(beta(0.5, 10, params(4, 2, 3)), wdro::InvalidParams);
  const auto cp = params(3, 2, 3);
  EXPECT_NEAR(beta(0.5, 10, cp), std::exp(-10 * 0.25), 1e-15);
  EXPECT_NEAR(beta(0.5, 10, cp), 0.0821, 5e-5);
  EXPECT_NEAR(beta(2.0, 10, cp), std::exp(-10 * std::pow(2.0, 1.5)), 1e-15);
  EXPECT_EQ(beta(0.0, 7, params(3, 2, 3, 0.4)), 0.4);
  EXPECT_EQ(beta(0.0, 7, params(3, 2, 3, 3.0)), 1.0);
}

TEST(Beta, MonotoneWithinBranches) {
  const auto cp = params(3, 1, 2, 2.0, 0.7);
  for (double N : {1.0, 5.0, 50.0}) {
    double prev = 2.0;
    for (int i = 0; i <= 300; ++i) {
      const double v = beta(0.01 * i, N, cp);
      EXPECT_LE(v, prev);
      prev = v;
      EXPECT_LE(beta(0.01 * i, N + 1, cp), v);
    }
  }
}

TEST(Beta, Validation) {
  EXPECT_THROW(beta(0.1, 1, params(4, 2, 2)), wdro::InvalidParams);
  EXPECT_THROW(beta(0.1, 1, params(4, 2, 1)), wdro::InvalidParams);
  EXPECT_THROW(beta(0.1, 1, params(2, 1, 3)), wdro::InvalidParams);
  EXPECT_THROW(eps_for_beta(0.0, 1, params(3, 1, 2)), wdro::InvalidParams);
}

TEST(EpsForBeta, RoundTripAndBranch) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ub(1e-6, 1.0);
  std::uniform_int_distribution<int> un(1, 500);
  for (const auto& cp : {params(3, 1, 2, 1.0, 1.0), params(1, 1, 3, 0.8, 0.05),
                         params(5, 2, 5, 1.0, 2.0)}) {
    for (int t = 0; t < 100; ++t) {
      const double b = ub(rng) * std::min(cp.c1, 1.0);
      const double N = un(rng);
      const double e = eps_for_beta(b, N, cp);
      EXPECT_NEAR(beta(e, N, cp), b, 1e-10 * std::max(1.0, b));
      const bool large_n = N >= std::log(cp.c1 / b) / cp.c2;
      EXPECT_EQ(large_n, e <= 1.0);
    }
  }
  EXPECT_EQ(eps_for_beta(0.8, 3, params(3, 1, 2, 0.8)), 0.0);
}

TEST(Prior, Cdfs) {
  EXPECT_EQ(Prior::none().cdf(1e9), 0.0);
  EXPECT_EQ(Prior::dirac(0.5).cdf(0.49), 0.0);
  EXPECT_EQ(Prior::dirac(0.5).cdf(0.5), 1.0);
  const auto g = Prior::gaussian(0.0, 1.0);
  EXPECT_NEAR(g.cdf(0.0), 0.0, 1e-15);
  // Half-normal: F(1) = 2 Phi(1) - 1.
  EXPECT_NEAR(g.cdf(1.0), std::erf(1.0 / std::sqrt(2.0)), 1e-14);
  const auto t = Prior::table({0.1, 0.3, 0.5}, {0.2, 0.6, 0.9});
  EXPECT_EQ(t.cdf(0.05), 0.0);
  EXPECT_NEAR(t.cdf(0.2), 0.4, 1e-15);
  EXPECT_EQ(t.cdf(0.6), 1.0);
  EXPECT_THROW(Prior::table({0.1, 0.05}, {0.1, 0.2}).validate(), wdro::InvalidParams);
  EXPECT_THROW(Prior::table({0.1, 0.2}, {0.3, 0.2}).validate(), wdro::InvalidParams);
  EXPECT_THROW(Prior::gaussian(0, 0).validate(), wdro::InvalidParams);
}

TEST(BayesianBeta, DiracRecoversProduct) {
  const auto cp = params(5, 2, 5, 0.9, 1.3);
  for (double eps : {0.3, 0.7, 1.5, 3.0}) {
    const double v = bayesian_beta(eps, 0.2, 5, 50, Prior::dirac(0.25), 0.8, cp);
    EXPECT_NEAR(v, std::min(1.0, beta(eps - 0.2, 5, cp) * beta(eps - 0.25, 50, cp) / 0.8),
                1e-15);
  }
  EXPECT_THROW(bayesian_beta(0.1, 0.2, 5, 50, Prior::dirac(0.2), 1.0, cp),
               wdro::PreconditionViolated);
  EXPECT_THROW(bayesian_beta(0.3, 0.2, 5, 50, Prior::dirac(0.2), 0.0, cp), wdro::InvalidParams);
}

TEST(BayesianBeta, VanishesAndNonIncreasing) {
  const auto cp = params(5, 2, 5);
  const std::vector<Prior> priors{Prior::dirac(0.4), Prior::gaussian(0.5, 0.3),
                                  Prior::table({0.0, 0.5, 1.0, 2.0}, {0.1, 0.5, 0.8, 1.0}),
                                  Prior::none()};
  for (const auto& pr : priors) {
    double prev = INFINITY;
    for (int i = 0; i < 50; ++i) {
      const double eps = 0.5 + 0.06 * i;
      const double v = bayesian_beta(eps, 0.5, 5, 50, pr, 1.0, cp);
      EXPECT_LE(v, prev + 1e-12);
      prev = v;
    }
    EXPECT_LT(bayesian_beta(50.0, 0.5, 5, 50, pr, 1.0, cp), 1e-12);
  }
}

TEST(BayesianBeta, QuadratureConverged) {
  const auto cp = params(5, 2, 5);
  for (const auto& pr : {Prior::gaussian(1.0, std::sqrt(0.2)), Prior::gaussian(1.0, 0.5),
                         Prior::table({0.0, 0.5, 1.0, 2.0}, {0.1, 0.5, 0.8, 1.0})}) {
    for (double eps : {1.0, 1.3, 2.0, 3.5}) {
      const double fine = bayesian_beta(eps, 1.0, 5, 50, pr, 1.0, cp, {2001});
      const double coarse = bayesian_beta(eps, 1.0, 5, 50, pr, 1.0, cp, {1001});
      EXPECT_LE(std::abs(fine - coarse), 1e-6);
    }
  }
}

TEST(BayesianBeta, StrongerPriorGivesSmallerSignificance) {
  const auto cp = params(5, 2, 5);
  const double r_hat = 1.0;
  std::vector<double> eps;
  for (int i = 0; i < 50; ++i) eps.push_back(r_hat + 0.04 * i);
  const auto strong = normalized_bayesian_curve(eps, r_hat, 5, 50,
                                                Prior::gaussian(r_hat, std::sqrt(0.2)), cp);
  const auto weak =
      normalized_bayesian_curve(eps, r_hat, 5, 50, Prior::gaussian(r_hat, std::sqrt(0.5)), cp);
  const auto none = normalized_bayesian_curve(eps, r_hat, 5, 50, Prior::none(), cp);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_LE(strong[i], weak[i] + 1e-12);
    EXPECT_LE(weak[i], none[i] + 1e-12);
  }
  EXPECT_LT(strong[10], weak[10]);
}

TEST(EpsBayesian, InverseProperties) {
  const auto cp = params(5, 2, 5);
  const auto pr = Prior::gaussian(0.5, 0.3);
  EXPECT_EQ(eps_bayesian(1.0, 0.5, 5, 50, pr, 1.0, cp), 0.5);
  double prev = 0.5;
  for (double b : {0.5, 0.1, 0.01, 1e-4}) {
    const double e = eps_bayesian(b, 0.5, 5, 50, pr, 1.0, cp);
    EXPECT_LE(bayesian_beta(e, 0.5, 5, 50, pr, 1.0, cp), b + 1e-9);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(ScenarioRadii, Constructors) {
  ScenarioInputs in;
  in.params = params(3, 1, 2);
  in.scenario = 1;
  in.r = {0.1, 0.2};
  in.beta = {0.05, 0.05};
  EXPECT_EQ(scenario_radii(in), (std::vector<double>{0.1, 0.2}));

  // Pick beta_k so that eps(beta_k, N_k) = 0.05: beta = c1 exp(-c2 N 0.05^3).
  in.scenario = 2;
  in.N = {40, 200};
  in.beta = {std::exp(-40 * std::pow(0.05, 3.0)), std::exp(-200 * std::pow(0.05, 3.0))};
  const auto e2 = scenario_radii(in);
  EXPECT_NEAR(e2[0], 0.15, 1e-12);
  EXPECT_NEAR(e2[1], 0.25, 1e-12);

  in.scenario = 3;
  in.params = params(1, 1, 2);
  in.beta = {0.1, 0.1};
  in.N = {3, 2};
  in.empirical = {DiscreteDistribution::uniform({{0.0}, {1.0}, {2.0}}),
                  DiscreteDistribution::uniform({{0.5}, {3.0}})};
  const auto e3 = scenario_radii(in);
  const double base = eps_for_beta(0.1, 3, in.params);
  EXPECT_NEAR(e3[0], base, 1e-12);
  EXPECT_NEAR(e3[1], base + wdro::testing::wasserstein1_1d(in.empirical[0], in.empirical[1]),
              1e-9);

  in.scenario = 4;
  in.params = params(5, 2, 5);
  in.r_hat = {0.0, 0.3};
  in.priors = {Prior::none(), Prior::gaussian(0.3, 0.2)};
  in.N = {5, 50};
  const auto e4 = scenario_radii(in);
  EXPECT_NEAR(e4[0], eps_for_beta(0.1, 5, in.params), 1e-12);
  EXPECT_LE(bayesian_beta(e4[1], 0.3, 5, 50, in.priors[1], 1.0, in.params), 0.1 + 1e-9);

  in.scenario = 5;
  in.priors[0] = Prior::dirac(0.2);
  const auto e5 = scenario_radii(in);
  for (int k = 0; k < 2; ++k) {
    EXPECT_LE(prior_tail_bound(e5[k], in.N[k], in.priors[k], in.params), 0.1 + 1e-9);
  }
  in.priors[1] = Prior::none();
  EXPECT_THROW(scenario_radii(in), wdro::Unreachable);
  in.scenario = 6;
  EXPECT_THROW(scenario_radii(in), wdro::PreconditionViolated);
}

// Ground truth: uniform on {0, 0.25, ..., 1} (bounded, hence light-tailed)
// and a shifted copy at W1 distance r.
DiscreteDistribution empirical(std::mt19937_64& rng, std::size_t N, double shift) {
  std::uniform_int_distribution<int> cell(0, 4);
  std::vector<Point> atoms(N);
  for (auto& a : atoms) a = {0.25 * cell(rng) + shift};
  return DiscreteDistribution::uniform(atoms);
}

TEST(Calibration, UnionBoundCoverage) {
  const std::vector<Point> grid{{0.0}, {0.25}, {0.5}, {0.75}, {1.0}};
  const auto truth = DiscreteDistribution::uniform(grid);
  ConcentrationParams shape = params(1, 1, 2);
  const auto fit = fit_concentration(
      [&](std::size_t N, std::mt19937_64& rng) {
        return wdro::testing::wasserstein1_1d(truth, empirical(rng, N, 0.0));
      },
      {5, 10, 20, 40}, {0.05, 0.1, 0.15, 0.2, 0.3}, 400, shape, 11);
  ASSERT_GT(fit.c1, 0.0);
  ASSERT_GT(fit.c2, 0.0);
  shape.c1 = fit.c1;
  shape.c2 = fit.c2;

  const std::vector<double> r{0.0, 0.3};
  const std::vector<double> N{20, 40};
  const std::vector<double> b{0.05, 0.05};
  ScenarioInputs in;
  in.scenario = 2;
  in.params = shape;
  in.r = r;
  in.beta = b;
  in.N = N;
  const auto eps = scenario_radii(in);
  std::mt19937_64 rng(12);
  int covered = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    bool in_all = true;
    for (int k = 0; k < 2; ++k) {
      const auto Pk = empirical(rng, static_cast<std::size_t>(N[k]), r[k]);
      in_all = in_all && wdro::testing::wasserstein1_1d(truth, Pk) <= eps[k];
    }
    covered += in_all ? 1 : 0;
  }
  EXPECT_GT(static_cast<double>(covered) / trials, 1.0 - b[0] - b[1]);
}

}  // namespace
