#include "wdro/lp/enumeration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wdro/errors.hpp"

namespace wdro::lp {

std::size_t count_supports(std::size_t n, std::size_t cap) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  std::size_t binom = 1;
  for (std::size_t k = 0; k <= cap && k <= n; ++k) {
    if (total > kMax - binom) return kMax;
    total += binom;
    // C(n, k+1) = C(n, k) * (n - k) / (k + 1), exact in this order.
    const std::size_t factor = n - k;
    if (factor != 0 && binom > kMax / factor) return kMax;
    binom = binom * factor / (k + 1);
  }
  return total;
}

BinarySolution solve_binary_by_enumeration(
    const LpModel& model, const std::vector<std::size_t>& binary_vars,
    std::size_t cardinality_cap, const EnumerationOptions& options) {
  const std::size_t nb = binary_vars.size();
  if (nb > 25) {
    throw InvalidArgument("at most 25 binary variables are supported");
  }
  if (cardinality_cap > nb) {
    throw InvalidArgument("cardinality cap exceeds the number of binaries");
  }
  for (std::size_t v : binary_vars) {
    if (v >= model.num_cols()) throw InvalidArgument("binary index out of range");
  }
  const std::size_t supports = count_supports(nb, cardinality_cap);
  if (supports > options.max_subsets) {
    throw SizeExceeded(std::to_string(supports) +
                       " supports exceed the enumeration budget");
  }

  const bool minimize = model.sense() == ObjectiveSense::kMinimize;
  BinarySolution best;
  best.lp.status = Status::kInfeasible;
  std::vector<double> lower(nb), upper(nb);
  std::vector<std::size_t> chosen;

  auto evaluate = [&]() -> bool {
    std::fill(lower.begin(), lower.end(), 0.0);
    for (std::size_t c : chosen) lower[c] = 1.0;
    upper = lower;
    LpSolution sol = solve_lp(model.with_bounds(binary_vars, lower, upper),
                              options.lp);
    ++best.supports_evaluated;
    if (sol.status == Status::kInfeasible) return false;
    const bool better =
        best.lp.status == Status::kInfeasible ||
        sol.status == Status::kUnbounded ||
        (minimize ? sol.objective < best.lp.objective
                  : sol.objective > best.lp.objective);
    if (better) {
      best.lp = std::move(sol);
      best.assignment.assign(nb, 0);
      for (std::size_t c : chosen) best.assignment[c] = 1;
    }
    return best.lp.status == Status::kUnbounded;
  };

  for (std::size_t size = 0; size <= cardinality_cap; ++size) {
    chosen.resize(size);
    for (std::size_t i = 0; i < size; ++i) chosen[i] = i;
    while (true) {
      if (evaluate()) return best;
      // Advance to the next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && chosen[i - 1] == nb - size + i - 1) --i;
      if (i == 0) break;
      ++chosen[i - 1];
      for (std::size_t k = i; k < size; ++k) chosen[k] = chosen[k - 1] + 1;
    }
  }
  return best;
}

}  // namespace wdro::lp
