#pragma once

#include <cstddef>
#include <vector>

#include "wdro/transport/cost.hpp"
#include "wdro/transport/distribution.hpp"

namespace wdro::barycenter {

using transport::DiscreteDistribution;
using transport::GroundCost;
using transport::Point;

struct InnerMinimizer {
  double phi = 0.0;
  Point Phi;
};

// argmin over xi of sum_k w_k c(xi, points_k). Squared Euclidean gives the
// weighted mean; L1 with p = 1 gives the coordinate-wise weighted median,
// taking the lower end of the median interval. Zero-weight points are
// ignored. Throws AllWeightsZero or UnsupportedCost.
InnerMinimizer inner_minimizer(const std::vector<Point>& points,
                               const std::vector<double>& weights,
                               const GroundCost& cost);

struct MultiMarginPlan {
  struct Entry {
    std::vector<std::size_t> alpha;
    double mass;
  };
  std::vector<Entry> entries;
};

struct BarycenterResult {
  DiscreteDistribution barycenter;
  MultiMarginPlan plan;
  double objective = 0.0;
};

struct BarycenterOptions {
  std::size_t max_multi_indices = 100000;
  // Pushforward atoms closer than this in every coordinate are merged.
  double merge_tol = 1e-10;
};

// Exact barycenter through the multi-marginal transport LP over all
// prod_k N_k index tuples, pushed forward through the inner minimizer.
// Throws SizeExceeded above max_multi_indices, AllWeightsZero,
// DimensionMismatch and UnsupportedCost.
BarycenterResult barycenter(const std::vector<DiscreteDistribution>& distributions,
                            const std::vector<double>& weights,
                            const GroundCost& cost,
                            const BarycenterOptions& options = {});

// sum_k w_k C(Q, P_k): the objective a candidate Q attains.
double barycenter_objective(const DiscreteDistribution& candidate,
                            const std::vector<DiscreteDistribution>& distributions,
                            const std::vector<double>& weights,
                            const GroundCost& cost);

}  // namespace wdro::barycenter
