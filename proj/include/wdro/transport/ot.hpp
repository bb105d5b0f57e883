#pragma once

#include <cstddef>
#include <vector>

#include "wdro/transport/cost.hpp"
#include "wdro/transport/distribution.hpp"

namespace wdro::transport {

// Sparse coupling between a source and a target distribution.
struct TransportPlan {
  struct Entry {
    std::size_t source;
    std::size_t target;
    double mass;
  };
  std::size_t num_sources = 0;
  std::size_t num_targets = 0;
  std::vector<Entry> entries;

  double total_mass() const;
  std::vector<double> source_marginal() const;
  std::vector<double> target_marginal() const;
};

struct OtResult {
  double value = 0.0;
  TransportPlan plan;
};

// Optimal transport between P and Q, solved as a transportation LP.
// Throws DimensionMismatch when the supports live in different spaces.
OtResult ot_cost(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                 const GroundCost& cost);

// (min over couplings of E||X - Y||^p)^(1/p).
double wasserstein_distance(const DiscreteDistribution& P,
                            const DiscreteDistribution& Q, Norm norm, int p = 1);

}  // namespace wdro::transport
