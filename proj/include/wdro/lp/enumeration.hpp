#pragma once

#include <cstddef>
#include <vector>

#include "wdro/lp/lp_model.hpp"
#include "wdro/lp/simplex.hpp"

namespace wdro::lp {

struct BinarySolution {
  LpSolution lp;
  // 0/1 value of each entry of binary_vars, in the order supplied.
  std::vector<int> assignment;
  std::size_t supports_evaluated = 0;
};

struct EnumerationOptions {
  SolverOptions lp;
  std::size_t max_subsets = std::size_t{1} << 20;
};

// Exhaustive search over binary supports. For every subset S of binary_vars
// with |S| <= cardinality_cap, the variables in S are fixed to 1, the rest to
// 0, and the remaining continuous problem is solved. Supports are visited by
// increasing size and lexicographically within a size; the first optimum
// wins ties. Infeasible supports are skipped; an unbounded support is
// returned immediately. If every support is infeasible the result carries
// Status::kInfeasible and an empty assignment.
BinarySolution solve_binary_by_enumeration(
    const LpModel& model, const std::vector<std::size_t>& binary_vars,
    std::size_t cardinality_cap, const EnumerationOptions& options = {});

// Number of supports of size <= cap drawn from n items, saturating.
std::size_t count_supports(std::size_t n, std::size_t cap);

}  // namespace wdro::lp
