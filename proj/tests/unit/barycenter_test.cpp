#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "wdro/barycenter/barycenter.hpp"
#include "wdro/errors.hpp"
#include "wdro/transport/ot.hpp"

namespace {

using namespace wdro::barycenter;
using wdro::transport::Norm;

std::vector<Point> sorted_atoms(const DiscreteDistribution& P) {
  auto a = P.atoms();
  std::sort(a.begin(), a.end());
  return a;
}

TEST(InnerMinimizer, Examples) {
  auto r = inner_minimizer({{1, 1}, {1, 0}}, {1, 1}, GroundCost::sq_euclidean());
  EXPECT_NEAR(r.Phi[0], 1.0, 1e-15);
  EXPECT_NEAR(r.Phi[1], 0.5, 1e-15);
  EXPECT_NEAR(r.phi, 0.5, 1e-15);

  r = inner_minimizer({{3, -1}}, {2.0}, GroundCost::sq_euclidean());
  EXPECT_EQ(r.Phi, (Point{3, -1}));
  EXPECT_EQ(r.phi, 0.0);

  const auto l1 = GroundCost::norm_power(Norm::kL1);
  r = inner_minimizer({{0}, {1}}, {2, 1}, l1);
  EXPECT_EQ(r.Phi, Point{0});
  EXPECT_NEAR(r.phi, 1.0, 1e-15);
  // Equal weights: the median interval is [0, 1]; the lower end is taken.
  r = inner_minimizer({{1}, {0}}, {1, 1}, l1);
  EXPECT_EQ(r.Phi, Point{0});
  // Zero-weight points are ignored.
  r = inner_minimizer({{5}, {1}}, {0, 1}, l1);
  EXPECT_EQ(r.Phi, Point{1});

  EXPECT_THROW(inner_minimizer({{0}}, {0.0}, l1), wdro::AllWeightsZero);
  EXPECT_THROW(inner_minimizer({{0}}, {1.0}, GroundCost::norm_power(Norm::kL2)),
               wdro::UnsupportedCost);
}

TEST(InnerMinimizer, WeightedMedianMatchesBreakpointScan) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2), w(0, 1);
  const auto l1 = GroundCost::norm_power(Norm::kL1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts(5);
    std::vector<double> wt(5);
    for (int k = 0; k < 5; ++k) {
      pts[k] = {u(rng)};
      wt[k] = w(rng);
    }
    const auto r = inner_minimizer(pts, wt, l1);
    double best = INFINITY;
    for (const auto& c : pts) {
      double v = 0;
      for (int k = 0; k < 5; ++k) v += wt[k] * std::abs(c[0] - pts[k][0]);
      best = std::min(best, v);
    }
    EXPECT_NEAR(r.phi, best, 1e-12);
  }
}

TEST(Barycenter, WorkedExample) {
  const DiscreteDistribution P1({{1, 1}, {0, 0}}, {0.5, 0.5});
  const DiscreteDistribution P2({{0, 1}, {1, 0}}, {0.5, 0.5});
  const auto r = barycenter({P1, P2}, {1, 1}, GroundCost::sq_euclidean());
  EXPECT_NEAR(r.objective, 0.5, 1e-9);
  const auto atoms = sorted_atoms(r.barycenter);
  const std::vector<Point> a{{0, 0.5}, {1, 0.5}};
  const std::vector<Point> b{{0.5, 0}, {0.5, 1}};
  EXPECT_TRUE(atoms == a || atoms == b);
  for (double p : r.barycenter.probs()) EXPECT_NEAR(p, 0.5, 1e-12);
}

TEST(Barycenter, IdenticalInputs) {
  const DiscreteDistribution P({{0.0, 1.0}, {2.0, -1.0}, {3.0, 3.0}}, {0.2, 0.3, 0.5});
  for (const auto& cost : {GroundCost::sq_euclidean(), GroundCost::norm_power(Norm::kL1)}) {
    const auto r = barycenter({P, P, P}, {0.2, 0.5, 0.3}, cost);
    EXPECT_NEAR(r.objective, 0.0, 1e-12);
    EXPECT_EQ(sorted_atoms(r.barycenter), sorted_atoms(P));
  }
}

DiscreteDistribution random_dist(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(-1, 1), w(0.2, 1);
  std::vector<Point> atoms(n, Point(d));
  std::vector<double> p(n);
  double s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (double& v : atoms[j]) v = u(rng);
    p[j] = w(rng);
    s += p[j];
  }
  for (double& v : p) v /= s;
  double t = 0;
  for (std::size_t j = 0; j + 1 < n; ++j) t += p[j];
  p[n - 1] = 1 - t;
  return DiscreteDistribution(atoms, p);
}

TEST(Barycenter, OptimalityAgainstRandomCandidates) {
  std::mt19937_64 rng(17);
  for (const auto& cost : {GroundCost::sq_euclidean(), GroundCost::norm_power(Norm::kL1)}) {
    for (int trial = 0; trial < 3; ++trial) {
      const std::vector<DiscreteDistribution> Ps{random_dist(rng, 3, 2), random_dist(rng, 4, 2),
                                                 random_dist(rng, 2, 2)};
      const std::vector<double> w{0.5, 0.3, 0.2};
      const auto r = barycenter(Ps, w, cost);
      const double own = barycenter_objective(r.barycenter, Ps, w, cost);
      EXPECT_NEAR(own, r.objective, 1e-7);
      for (int c = 0; c < 20; ++c) {
        const auto Q = random_dist(rng, 1 + c % 5, 2);
        EXPECT_LE(r.objective, barycenter_objective(Q, Ps, w, cost) + 1e-7);
      }
    }
  }
}

TEST(Barycenter, PlanMarginalsAndWeightScaling) {
  std::mt19937_64 rng(23);
  const std::vector<DiscreteDistribution> Ps{random_dist(rng, 3, 2), random_dist(rng, 3, 2)};
  const auto cost = GroundCost::sq_euclidean();
  const auto r = barycenter(Ps, {1.0, 3.0}, cost);
  double total = 0;
  std::vector<std::vector<double>> marg{std::vector<double>(3), std::vector<double>(3)};
  for (const auto& e : r.plan.entries) {
    total += e.mass;
    marg[0][e.alpha[0]] += e.mass;
    marg[1][e.alpha[1]] += e.mass;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(marg[k][j], Ps[k].prob(j), 1e-9);
  }
  const auto scaled = barycenter(Ps, {4.0, 12.0}, cost);
  EXPECT_NEAR(scaled.objective, 4.0 * r.objective, 1e-9);
  EXPECT_EQ(sorted_atoms(scaled.barycenter), sorted_atoms(r.barycenter));
}

TEST(Barycenter, OneWassersteinTwoSourcesPicksHeavier) {
  std::mt19937_64 rng(29);
  const auto cost = GroundCost::norm_power(Norm::kL1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<DiscreteDistribution> Ps{random_dist(rng, 3, 2), random_dist(rng, 4, 2)};
    const std::vector<double> w{0.7, 0.3};
    const auto r = barycenter(Ps, w, cost);
    EXPECT_NEAR(r.objective, barycenter_objective(Ps[0], Ps, w, cost), 1e-9);
  }
}

TEST(Barycenter, GeodesicInterpolation) {
  const DiscreteDistribution P({{0.0}, {1.0}}, {0.5, 0.5});
  const DiscreteDistribution Q({{2.0}, {5.0}}, {0.5, 0.5});
  for (double t : {0.1, 0.25, 0.5, 0.8}) {
    const auto r = barycenter({P, Q}, {t, 1 - t}, GroundCost::sq_euclidean());
    // Monotone matching 0->2, 1->5 is the unique optimum.
    const auto atoms = sorted_atoms(r.barycenter);
    ASSERT_EQ(atoms.size(), 2u);
    EXPECT_NEAR(atoms[0][0], t * 0.0 + (1 - t) * 2.0, 1e-12);
    EXPECT_NEAR(atoms[1][0], t * 1.0 + (1 - t) * 5.0, 1e-12);
  }
}

TEST(Barycenter, Guards) {
  const auto P = DiscreteDistribution::dirac({0.0});
  EXPECT_THROW(barycenter({P, P}, {0, 0}, GroundCost::sq_euclidean()), wdro::AllWeightsZero);
  BarycenterOptions opt;
  opt.max_multi_indices = 5;
  const auto Q = DiscreteDistribution::uniform({{0.0}, {1.0}, {2.0}});
  EXPECT_THROW(barycenter({Q, Q}, {1, 1}, GroundCost::sq_euclidean(), opt), wdro::SizeExceeded);
  EXPECT_THROW(barycenter({P, DiscreteDistribution::dirac({0.0, 1.0})}, {1, 1},
                          GroundCost::sq_euclidean()),
               wdro::DimensionMismatch);
}

}  // namespace
