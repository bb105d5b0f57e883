#pragma once

#include <cstddef>
#include <vector>

#include "wdro/lp/simplex.hpp"
#include "wdro/msdro/dual_lp.hpp"
#include "wdro/msdro/types.hpp"

namespace wdro::msdro {

// kCutGeneration needs an L1 cost on the whole space: each robust block is
// replaced by single rows, one per choice of anchor coordinate for every
// coordinate, added lazily over (theta, lambda, gamma) only.
enum class Strategy { kAuto, kFullModel, kBlockGeneration, kCutGeneration };
enum class FormChoice { kAuto, kConjugate, kSeparable };

struct SolveOptions {
  Strategy strategy = Strategy::kAuto;
  // kAuto picks kSeparable for L1 costs on the whole space.
  FormChoice form = FormChoice::kAuto;
  // kAuto assembles everything when the full model stays below this size,
  // and otherwise prefers cut generation where it applies.
  std::size_t full_model_max_rows = 2500;
  std::size_t max_blocks = 5000000;
  std::size_t max_blocks_per_round = 64;
  std::size_t max_cuts_per_round = 256;
  std::size_t max_rounds = 500;
  // Blocks violated by more than tol * (1 + |value|) are added.
  double violation_tol = 1e-9;
  // Optional warm start for block generation; receives the final set.
  std::vector<BlockId>* blocks = nullptr;
  lp::SolverOptions lp;
};

struct SolveStats {
  std::size_t rounds = 0;
  std::size_t blocks = 0;
  std::size_t total_blocks = 0;
  std::size_t lp_iterations = 0;
};

// Optimal dual (lambda, gamma) and the worst-case expected loss.
// Throws IntersectionEmpty when the balls do not intersect.
DualSolution worst_case_value(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                              const Polyhedron& support, const SolveOptions& options = {},
                              SolveStats* stats = nullptr);

// A discrete worst-case distribution with at most 1 + sum_k N_k atoms,
// recovered from the LP multipliers of the robust rows and then reduced to a
// basic solution of the transport-feasibility LP over the recovered atoms.
WorstCaseDistribution worst_case_distribution(const AmbiguitySpec& amb,
                                              const PiecewiseAffineLoss& loss,
                                              const Polyhedron& support,
                                              const SolveOptions& options = {});

struct MsdroSolution {
  std::vector<double> theta;
  double value = 0.0;
  DualSolution dual;
  SolveStats stats;
};

// min over theta of the worst-case expected loss, as one LP over
// (theta, lambda, gamma, block variables).
MsdroSolution solve_msdro(const AmbiguitySpec& amb, const DecisionLoss& loss,
                          const DecisionSet& decisions, const Polyhedron& support,
                          const SolveOptions& options = {});

// max over blocks of sup_xi [l_l(xi) - sum_k lambda_k c(xi, xi_{k,alpha_k})]
// - sum_k gamma_{k,alpha_k}; nonpositive (up to tolerance) iff the point is
// dual feasible. Negative lambda gives +infinity.
double max_robust_violation(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                            const Polyhedron& support, const DualSolution& point);

// sum_k eps_k lambda_k + sum_{k,j} p_kj gamma_kj.
double dual_objective(const AmbiguitySpec& amb, const DualSolution& point);

}  // namespace wdro::msdro
