#pragma once

#include <span>

namespace wdro::transport {

enum class Norm { kL1, kL2, kLinf };

double norm(std::span<const double> v, Norm kind);
// Norm of a - b.
double distance(std::span<const double> a, std::span<const double> b, Norm kind);
// Dual norm kind: L1 <-> Linf, L2 <-> L2.
Norm dual_norm(Norm kind);

// Transport cost c(x, y): either ||x - y||^p for a chosen norm, or the
// squared Euclidean distance.
struct GroundCost {
  enum class Kind { kNormPower, kSqEuclidean };

  Kind kind = Kind::kNormPower;
  Norm norm = Norm::kL1;
  int p = 1;

  static GroundCost norm_power(Norm n, int p = 1) {
    return {Kind::kNormPower, n, p};
  }
  static GroundCost sq_euclidean() { return {Kind::kSqEuclidean, Norm::kL2, 2}; }

  double operator()(std::span<const double> x, std::span<const double> y) const;
};

}  // namespace wdro::transport
