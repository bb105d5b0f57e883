#include "wdro/transport/distribution.hpp"

#include <cmath>

#include "wdro/errors.hpp"

namespace wdro::transport {

DiscreteDistribution::DiscreteDistribution(std::vector<Point> atoms,
                                           std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
  if (atoms_.empty()) throw InvalidArgument("distribution has no atoms");
  if (atoms_.size() != probs_.size()) {
    throw DimensionMismatch("atoms and probs differ in length");
  }
  const std::size_t d = atoms_[0].size();
  double total = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (atoms_[j].size() != d) throw DimensionMismatch("atoms of unequal dimension");
    for (double v : atoms_[j]) {
      if (!std::isfinite(v)) throw InvalidArgument("atom coordinate is not finite");
    }
    if (!(probs_[j] > 0.0) || !std::isfinite(probs_[j])) {
      throw InvalidArgument("probabilities must be strictly positive");
    }
    total += probs_[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("probabilities must sum to one");
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<Point> atoms) {
  const std::size_t n = atoms.size();
  return DiscreteDistribution(std::move(atoms),
                              std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0));
}

DiscreteDistribution DiscreteDistribution::dirac(Point atom) {
  return DiscreteDistribution({std::move(atom)}, {1.0});
}

}  // namespace wdro::transport
