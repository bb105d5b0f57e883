#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "wdro/msdro/types.hpp"
#include "wdro/oracle/moreau.hpp"

namespace wdro::oracle {

using msdro::AmbiguitySpec;
using msdro::DualSolution;

// Dual points are flattened as (lambda_1..lambda_K, gamma_1, ..., gamma_K)
// with gamma blocks in source order.
std::vector<double> flatten(const DualSolution& point);
DualSolution unflatten(const AmbiguitySpec& amb, const std::vector<double>& x);

struct Separation {
  bool inside = true;
  // Valid for every dual-feasible point and violated by the query point.
  Halfspace cut;
};

// Membership in the dual feasible set: lambda >= 0 and, for every multi-index
// alpha, the Moreau envelope at (lambda, anchors of alpha) is at most
// sum_k gamma_{k, alpha_k}.
Separation separation_oracle(const DualSolution& point, const AmbiguitySpec& amb,
                             const PiecewiseAffineLoss& loss, const Polyhedron& support);

struct EllipsoidState {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;
  std::size_t iterations = 0;
  double best_value = INFINITY;
  // log det of the shape matrix after each update.
  std::vector<double> log_det;
};

struct EllipsoidResult {
  double value = 0.0;
  // Lower bound from the final ellipsoid; value - lower_bound <= delta.
  double lower_bound = -INFINITY;
  DualSolution dual;
  EllipsoidState state;
};

struct EllipsoidOptions {
  std::size_t max_iterations = 100000;
};

// Radius heuristic: ten times the Euclidean norm of the LP dual optimum, at
// least ten.
double default_radius(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                      const Polyhedron& support);

// Central-cut ellipsoid method on the dual, starting from the ball of radius
// R about the origin. Stops once the best feasible value is within delta of
// the ellipsoid lower bound. Throws IterationBudgetExceeded when the budget
// runs out or the best point reaches the boundary of the initial ball.
EllipsoidResult ellipsoid_solve(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                                const Polyhedron& support, double R, double delta,
                                const EllipsoidOptions& options = {});

}  // namespace wdro::oracle
