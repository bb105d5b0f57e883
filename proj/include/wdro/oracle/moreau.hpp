#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wdro/msdro/types.hpp"

namespace wdro::oracle {

using msdro::PiecewiseAffineLoss;
using msdro::Polyhedron;
using transport::GroundCost;
using transport::Point;

// {x : <normal, x> <= offset}.
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;

  bool contains(std::span<const double> x, double tol = 1e-9) const;
};

struct MoreauResult {
  bool finite = true;
  double value = 0.0;
  Point maximizer;
  std::size_t piece = 0;
  // Set when !finite: every lambda' with a finite envelope lies inside.
  Halfspace halfspace;
};

// sup over xi in the support of loss(xi) - sum_k lambda_k c(xi, anchor_k),
// one epigraph LP per piece. Norm costs with p = 1 only (L1 or Linf).
// Throws NegativeLambda for lambda_k < 0 and UnsupportedCost otherwise.
MoreauResult moreau_envelope(std::span<const double> lambda,
                             const std::vector<Point>& anchors,
                             const PiecewiseAffineLoss& loss,
                             const Polyhedron& support, const GroundCost& cost);

}  // namespace wdro::oracle
