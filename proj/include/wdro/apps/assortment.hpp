#pragma once

#include <cstddef>
#include <vector>

#include "wdro/lp/enumeration.hpp"
#include "wdro/msdro/msdro.hpp"

namespace wdro::apps {

// Pick at most `capacity` products to maximize the worst-case expected
// revenue sum_i theta_i p_i xi_i, demands xi in R_+^d.
struct AssortmentSpec {
  std::vector<double> prices;
  std::size_t capacity = 0;
  msdro::AmbiguitySpec ambiguity;

  void validate() const;
};

struct AssortmentResult {
  std::vector<int> selection;
  double revenue = 0.0;
  std::size_t supports_evaluated = 0;
};

// Loss -sum_i theta_i p_i xi_i with theta the decision vector.
msdro::DecisionLoss assortment_loss(const AssortmentSpec& spec);

// Demand support R_+^d.
msdro::Polyhedron demand_support(std::size_t dim);

// One dual LP with theta in [0,1]^d and sum theta <= B; binaries are fixed
// support by support. Throws IntersectionEmpty for disjoint balls.
AssortmentResult assortment_solve(const AssortmentSpec& spec,
                                  const lp::EnumerationOptions& options = {});

// Worst-case expected revenue of a fixed selection.
double assortment_revenue(const AssortmentSpec& spec, const std::vector<int>& selection);

}  // namespace wdro::apps
