#pragma once

#include <cstddef>
#include <vector>

#include "wdro/lp/lp_model.hpp"

namespace wdro::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

// Simplex status of a column or a row's activity variable.
enum class BasisStatus : unsigned char { kBasic, kAtLower, kAtUpper, kFree };

const char* to_string(Status status) noexcept;

struct SolverOptions {
  double pivot_tol = 1e-9;
  double feas_tol = 1e-7;
  // Relative: reduced costs are compared against opt_tol * max|c| (opt_tol
  // when every cost is zero), so scaling the objective keeps the pivots.
  double opt_tol = 1e-7;
  // Degenerate pivots in a row before switching to Bland's rule.
  int stall_limit = 50;
  // Eta vectors accumulated before the basis is refactorized.
  int refactor_interval = 80;
  std::size_t max_iterations = 500000;
  // Desk-scale envelope; larger models throw SizeExceeded.
  std::size_t max_rows = 5000;
  std::size_t max_cols = 20000;
};

// Result of solve_lp. Conventions:
//  * dual[i] is the sensitivity d(objective)/d(rhs_i) of the returned basis,
//    in the model's own objective sense. For a minimization, <= rows carry
//    dual <= 0 and >= rows carry dual >= 0.
//  * reduced_cost[j] = c_j - A_j' dual.
//  * kUnbounded: primal_ray is a recession direction (A r within the row
//    cones, bounds respected) that strictly improves the objective.
//  * kInfeasible: dual_ray y is a Farkas certificate: the maximum of
//    y'(Ax) - y'r over the variable box and the row-activity box r is < 0,
//    so no x can satisfy the rows (checked by farkas_margin below).
struct LpSolution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> dual;
  std::vector<double> reduced_cost;
  std::vector<double> primal_ray;
  std::vector<double> dual_ray;
  std::size_t iterations = 0;
  // Final basis: num_cols column entries, then num_rows row entries.
  std::vector<BasisStatus> basis;
};

// Two-phase bounded revised simplex. Deterministic for identical input.
// Throws SizeExceeded outside the envelope and NumericalFailure when the
// basis becomes singular or the iteration budget is exhausted.
LpSolution solve_lp(const LpModel& model, const SolverOptions& options = {});

// Same, starting from a previous basis. The start may describe a model with
// the same columns and a prefix of the rows; missing rows start basic. An
// unusable start falls back to the all-logical basis.
LpSolution solve_lp(const LpModel& model, const SolverOptions& options,
                    const std::vector<BasisStatus>& start);

// max over the boxes of y'(Ax) - y'r; negative values certify infeasibility.
double farkas_margin(const LpModel& model, const std::vector<double>& y);

}  // namespace wdro::lp
