#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wdro::transport {

using Point = std::vector<double>;

// Finitely supported probability distribution with strictly positive
// weights. Coincident atoms are allowed and kept as given.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  // Throws InvalidArgument unless probs are positive and sum to 1 within
  // 1e-12, and DimensionMismatch unless all atoms share one dimension.
  DiscreteDistribution(std::vector<Point> atoms, std::vector<double> probs);

  // Equal weights 1/N.
  static DiscreteDistribution uniform(std::vector<Point> atoms);
  static DiscreteDistribution dirac(Point atom);

  std::size_t size() const noexcept { return atoms_.size(); }
  std::size_t dim() const noexcept { return atoms_.empty() ? 0 : atoms_[0].size(); }
  const std::vector<Point>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const Point& atom(std::size_t j) const { return atoms_[j]; }
  double prob(std::size_t j) const { return probs_[j]; }

  // Expectation of a scalar function of the atom.
  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) s += probs_[j] * f(atoms_[j]);
    return s;
  }

 private:
  std::vector<Point> atoms_;
  std::vector<double> probs_;
};

}  // namespace wdro::transport
