#include "wdro/transport/cost.hpp"

#include <cmath>

#include "wdro/errors.hpp"

namespace wdro::transport {

double norm(std::span<const double> v, Norm kind) {
  double s = 0.0;
  switch (kind) {
    case Norm::kL1:
      for (double x : v) s += std::abs(x);
      return s;
    case Norm::kL2:
      for (double x : v) s += x * x;
      return std::sqrt(s);
    case Norm::kLinf:
      for (double x : v) s = std::max(s, std::abs(x));
      return s;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b, Norm kind) {
  if (a.size() != b.size()) throw DimensionMismatch("points of unequal dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - b[i];
    switch (kind) {
      case Norm::kL1:
        s += std::abs(x);
        break;
      case Norm::kL2:
        s += x * x;
        break;
      case Norm::kLinf:
        s = std::max(s, std::abs(x));
        break;
    }
  }
  return kind == Norm::kL2 ? std::sqrt(s) : s;
}

Norm dual_norm(Norm kind) {
  switch (kind) {
    case Norm::kL1:
      return Norm::kLinf;
    case Norm::kLinf:
      return Norm::kL1;
    case Norm::kL2:
      return Norm::kL2;
  }
  return kind;
}

double GroundCost::operator()(std::span<const double> x,
                              std::span<const double> y) const {
  if (kind == Kind::kSqEuclidean) {
    if (x.size() != y.size()) throw DimensionMismatch("points of unequal dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s;
  }
  const double r = distance(x, y, norm);
  return p == 1 ? r : std::pow(r, p);
}

}  // namespace wdro::transport
