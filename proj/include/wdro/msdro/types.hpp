#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wdro/errors.hpp"
#include "wdro/transport/cost.hpp"
#include "wdro/transport/distribution.hpp"

namespace wdro::msdro {

using transport::DiscreteDistribution;
using transport::GroundCost;
using transport::Point;

struct Source {
  DiscreteDistribution center;
  double radius = 0.0;
};

// Intersection of K transport balls around discrete centers.
struct AmbiguitySpec {
  GroundCost cost = GroundCost::norm_power(transport::Norm::kL1, 1);
  std::vector<Source> sources;

  std::size_t num_sources() const noexcept { return sources.size(); }
  std::size_t dim() const { return sources.empty() ? 0 : sources[0].center.dim(); }
  // K >= 1, equal dimensions, finite nonnegative radii.
  void validate() const;
};

struct AffinePiece {
  std::vector<double> a;
  double b = 0.0;
};

// l(xi) = max_l <a_l, xi> + b_l.
struct PiecewiseAffineLoss {
  std::vector<AffinePiece> pieces;

  std::size_t dim() const { return pieces.empty() ? 0 : pieces[0].a.size(); }
  double operator()(std::span<const double> xi) const;
  double piece(std::size_t l, std::span<const double> xi) const;
  void validate(std::size_t d) const;
};

// {x : C x <= g}; zero rows means the whole space.
struct Polyhedron {
  std::vector<std::vector<double>> C;
  std::vector<double> g;

  std::size_t num_rows() const noexcept { return g.size(); }
  bool contains(std::span<const double> x, double tol = 1e-9) const;
  void validate(std::size_t d) const;

  static Polyhedron whole_space() { return {}; }
  static Polyhedron box(std::size_t d, double lo, double hi);
};

struct DualSolution {
  std::vector<double> lambda;
  std::vector<std::vector<double>> gamma;
  double value = 0.0;
};

// Recession direction of the dual feasible set along which the dual
// objective decreases; proves the intersection of balls is empty.
struct InfeasibilityCertificate {
  std::vector<double> lambda_inf;
  std::vector<std::vector<double>> gamma_inf;
  double slope = 0.0;
  // A dual-feasible point the direction was observed from.
  DualSolution base;
};

class IntersectionEmpty : public Error {
 public:
  IntersectionEmpty(const std::string& what, InfeasibilityCertificate cert)
      : Error(what), certificate_(std::move(cert)) {}
  const InfeasibilityCertificate& certificate() const noexcept { return certificate_; }

 private:
  InfeasibilityCertificate certificate_;
};

struct WorstCaseDistribution {
  DiscreteDistribution distribution;
  std::size_t support_bound = 0;
  // Transport cost of the recovered coupling to each center.
  std::vector<double> budgets_used;
};

// Loss whose pieces are affine in a decision theta in R^n:
//   l_theta(xi) = max_l <A_l theta + a0_l, xi> + <c_l, theta> + b0_l.
struct DecisionPiece {
  std::vector<std::vector<double>> A;  // d rows, n columns
  std::vector<double> a0;
  std::vector<double> c;
  double b0 = 0.0;
};

struct DecisionLoss {
  std::size_t num_decisions = 0;
  std::vector<DecisionPiece> pieces;

  PiecewiseAffineLoss at(std::span<const double> theta) const;
  void validate(std::size_t d) const;
  // Loss with no decision variables.
  static DecisionLoss constant(const PiecewiseAffineLoss& loss);
};

// {theta : D theta <= h, lower <= theta <= upper}. Empty bound vectors mean
// free variables.
struct DecisionSet {
  Polyhedron rows;
  std::vector<double> lower;
  std::vector<double> upper;
};

}  // namespace wdro::msdro
