#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "oracles.hpp"
#include "wdro/msdro/msdro.hpp"
#include "wdro/oracle/ellipsoid.hpp"
#include "wdro/transport/ot.hpp"

namespace {

using namespace wdro::oracle;
using wdro::msdro::Source;
using wdro::transport::DiscreteDistribution;
using wdro::transport::Norm;

const GroundCost kL1 = GroundCost::norm_power(Norm::kL1);

TEST(Moreau, LargeLambdaReturnsAnchor) {
  const std::vector<double> a{0.5, -2.0, 1.25};
  const Point anchor{0.3, 1.0, -0.7};
  const PiecewiseAffineLoss loss{{{a, 0.0}}};
  const std::vector<double> lambda{3.0};
  const auto r = moreau_envelope(lambda, {anchor}, loss, Polyhedron::whole_space(), kL1);
  ASSERT_TRUE(r.finite);
  EXPECT_NEAR(r.value, 0.5 * 0.3 - 2.0 + 1.25 * -0.7, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.maximizer[i], anchor[i], 1e-12);
}

TEST(Moreau, ZeroLambdaUnbounded) {
  const PiecewiseAffineLoss loss{{{{1.0, -1.0}, 0.0}}};
  const std::vector<double> lambda{0.0, 0.0};
  const auto r =
      moreau_envelope(lambda, {{0, 0}, {1, 1}}, loss, Polyhedron::whole_space(), kL1);
  EXPECT_FALSE(r.finite);
  EXPECT_FALSE(r.halfspace.contains(lambda));
  // Finite region for L1: lambda_1 + lambda_2 >= |a|_inf = 1.
  EXPECT_TRUE(r.halfspace.contains(std::vector<double>{0.5, 0.5}));
  EXPECT_TRUE(r.halfspace.contains(std::vector<double>{2.0, 0.0}));
}

TEST(Moreau, ConstantLoss) {
  const PiecewiseAffineLoss loss{{{{0.0, 0.0}, 2.5}}};
  for (Norm n : {Norm::kL1, Norm::kLinf}) {
    const auto r = moreau_envelope(std::vector<double>{0.7}, {{1, 2}}, loss,
                                   Polyhedron::whole_space(), GroundCost::norm_power(n));
    EXPECT_NEAR(r.value, 2.5, 1e-12);
  }
}

TEST(Moreau, ValueMatchesMaximizerOnBox) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1), l(0, 1.5);
  for (Norm n : {Norm::kL1, Norm::kLinf}) {
    for (int t = 0; t < 30; ++t) {
      PiecewiseAffineLoss loss;
      for (int p = 0; p < 3; ++p) loss.pieces.push_back({{u(rng), u(rng)}, u(rng)});
      const std::vector<Point> anchors{{u(rng), u(rng)}, {u(rng), u(rng)}};
      const std::vector<double> lambda{l(rng), l(rng)};
      const auto cost = GroundCost::norm_power(n);
      const auto r = moreau_envelope(lambda, anchors, loss, Polyhedron::box(2, -2, 2), cost);
      ASSERT_TRUE(r.finite);
      const double recomputed =
          loss(r.maximizer) - lambda[0] * cost(r.maximizer, anchors[0]) -
          lambda[1] * cost(r.maximizer, anchors[1]);
      EXPECT_NEAR(r.value, recomputed, 1e-8);
      // Dense grid search never beats the LP value.
      for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 40; ++j) {
          const Point x{-2 + 0.1 * i, -2 + 0.1 * j};
          const double v =
              loss(x) - lambda[0] * cost(x, anchors[0]) - lambda[1] * cost(x, anchors[1]);
          EXPECT_LE(v, r.value + 1e-9);
        }
      }
    }
  }
}

TEST(Moreau, Errors) {
  const PiecewiseAffineLoss loss{{{{1.0}, 0.0}}};
  EXPECT_THROW(moreau_envelope(std::vector<double>{-0.1}, {{0.0}}, loss,
                               Polyhedron::whole_space(), kL1),
               wdro::NegativeLambda);
  EXPECT_THROW(moreau_envelope(std::vector<double>{1.0}, {{0.0}}, loss,
                               Polyhedron::whole_space(), GroundCost::norm_power(Norm::kL2)),
               wdro::UnsupportedCost);
}

AmbiguitySpec random_instance(std::mt19937_64& rng, PiecewiseAffineLoss& loss) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> nk(1, 3);
  const auto P1 = wdro::testing::random_grid_distribution(rng, 2, nk(rng));
  const auto P2 = wdro::testing::random_grid_distribution(rng, 2, nk(rng));
  AmbiguitySpec amb;
  amb.cost = kL1;
  const double w = wdro::transport::ot_cost(P1, P2, kL1).value;
  amb.sources = {{P1, 0.1 + 0.5 * w}, {P2, 0.1 + 0.6 * w}};
  loss.pieces.clear();
  for (int l = 0; l < 2; ++l) loss.pieces.push_back({{u(rng), u(rng)}, u(rng)});
  return amb;
}

TEST(Separation, NegativeLambdaCut) {
  std::mt19937_64 rng(1);
  PiecewiseAffineLoss loss;
  const auto amb = random_instance(rng, loss);
  auto point = wdro::msdro::worst_case_value(amb, loss, Polyhedron::box(2, 0, 1));
  point.lambda[0] = -1.0;
  const auto s = separation_oracle(point, amb, loss, Polyhedron::box(2, 0, 1));
  ASSERT_FALSE(s.inside);
  EXPECT_EQ(s.cut.normal[0], -1.0);
  EXPECT_EQ(s.cut.offset, 0.0);
}

TEST(Separation, LpOptimumInsideAndPerturbedOutside) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> up(0, 2);
  const auto box = Polyhedron::box(2, 0, 1);
  for (int t = 0; t < 5; ++t) {
    PiecewiseAffineLoss loss;
    const auto amb = random_instance(rng, loss);
    auto opt = wdro::msdro::worst_case_value(amb, loss, box);
    // Nudge upward so the tolerance of the LP does not matter.
    opt.gamma[0][0] += 1e-7;
    for (auto& g : opt.gamma) {
      for (double& v : g) v += 1e-7;
    }
    EXPECT_TRUE(separation_oracle(opt, amb, loss, box).inside);

    auto cutoff = opt;
    cutoff.gamma[0][0] -= 1.0;
    const auto s = separation_oracle(cutoff, amb, loss, box);
    ASSERT_FALSE(s.inside);
    EXPECT_FALSE(s.cut.contains(flatten(cutoff)));

    // Feasible points: raise lambda and gamma from the optimum.
    for (int k = 0; k < 50; ++k) {
      auto p = opt;
      for (double& l : p.lambda) l += up(rng);
      for (auto& g : p.gamma) {
        for (double& v : g) v += up(rng);
      }
      ASSERT_LE(wdro::msdro::max_robust_violation(amb, loss, box, p), 1e-9);
      EXPECT_TRUE(s.cut.contains(flatten(p)));
    }
  }
}

TEST(Separation, InfiniteEnvelopeCut) {
  const DiscreteDistribution P({{0.0, 0.0}}, {1.0});
  AmbiguitySpec amb;
  amb.cost = kL1;
  amb.sources = {{P, 0.5}};
  const PiecewiseAffineLoss loss{{{{2.0, -1.0}, 0.0}}};
  wdro::msdro::DualSolution q{{0.5}, {{10.0}}, 0.0};
  const auto s = separation_oracle(q, amb, loss, Polyhedron::whole_space());
  ASSERT_FALSE(s.inside);
  EXPECT_FALSE(s.cut.contains(flatten(q)));
  EXPECT_TRUE(s.cut.contains(std::vector<double>{2.0, 0.0}));
}

TEST(Ellipsoid, AgreesWithLp) {
  std::mt19937_64 rng(3);
  const auto box = Polyhedron::box(2, 0, 1);
  for (int t = 0; t < 4; ++t) {
    PiecewiseAffineLoss loss;
    const auto amb = random_instance(rng, loss);
    const double v = wdro::msdro::worst_case_value(amb, loss, box).value;
    const auto r = ellipsoid_solve(amb, loss, box, default_radius(amb, loss, box), 1e-3);
    EXPECT_NEAR(r.value, v, 1e-3);
    EXPECT_LE(r.lower_bound, v + 1e-9);
    EXPECT_LE(wdro::msdro::max_robust_violation(amb, loss, box, r.dual), 1e-8);
  }
}

TEST(Ellipsoid, SampleAverageAtZeroRadius) {
  const DiscreteDistribution P({{0.0}, {1.0}, {0.5}}, {0.3, 0.3, 0.4});
  AmbiguitySpec amb;
  amb.cost = kL1;
  amb.sources = {{P, 0.0}};
  const PiecewiseAffineLoss loss{{{{1.0}, 0.0}, {{-2.0}, 1.0}}};
  double saa = 0;
  for (std::size_t j = 0; j < 3; ++j) saa += P.prob(j) * loss(P.atom(j));
  const auto r = ellipsoid_solve(amb, loss, Polyhedron::whole_space(), 20.0, 1e-3);
  EXPECT_NEAR(r.value, saa, 1e-3);
}

TEST(Ellipsoid, EmptyIntersectionNotReportedAsValue) {
  AmbiguitySpec amb;
  amb.cost = kL1;
  amb.sources = {{DiscreteDistribution::dirac({0.0}), 0.25},
                 {DiscreteDistribution::dirac({1.0}), 0.25}};
  const PiecewiseAffineLoss loss{{{{1.0}, 0.0}}};
  EXPECT_THROW(wdro::msdro::worst_case_value(amb, loss, Polyhedron::whole_space()),
               wdro::msdro::IntersectionEmpty);
  EllipsoidOptions opt;
  opt.max_iterations = 20000;
  EXPECT_THROW(ellipsoid_solve(amb, loss, Polyhedron::whole_space(), 50.0, 1e-3, opt),
               wdro::IterationBudgetExceeded);
}

TEST(Ellipsoid, ShapeVolumeDecreases) {
  std::mt19937_64 rng(4);
  PiecewiseAffineLoss loss;
  const auto amb = random_instance(rng, loss);
  const auto box = Polyhedron::box(2, 0, 1);
  const auto r = ellipsoid_solve(amb, loss, box, 30.0, 1e-3);
  ASSERT_FALSE(r.state.log_det.empty());
  double prev = static_cast<double>(r.state.shape.rows()) * std::log(900.0);
  for (double ld : r.state.log_det) {
    EXPECT_LT(ld, prev);
    prev = ld;
  }
}

}  // namespace
