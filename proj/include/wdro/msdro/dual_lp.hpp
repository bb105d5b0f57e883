#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "wdro/lp/lp_model.hpp"
#include "wdro/msdro/types.hpp"

namespace wdro::msdro {

// How each robust block sup_xi [l_l(xi) - sum_k lambda_k c(xi, xi_k)] <= sum_k
// gamma_k is written as linear rows.
//  * kConjugate: support-function/conjugate form with z >= 0 and w_k in R^d
//    and dual-norm caps ||w_k||_* <= lambda_k. Any polyhedral support.
//  * kSeparable: L1 cost on the whole space only. The sup splits by
//    coordinate and is attained at an anchor coordinate, so one epigraph
//    variable t_i per coordinate with K rows each, plus shared rows
//    |a_{l,i}| <= sum_k lambda_k.
enum class BlockForm { kConjugate, kSeparable };

// Robust block (alpha, l); alpha is the mixed-radix index of the tuple
// (alpha_1, ..., alpha_K) with alpha_K varying fastest.
struct BlockId {
  std::size_t alpha = 0;
  std::size_t piece = 0;
  auto operator<=>(const BlockId&) const = default;
};

struct BlockLayout {
  BlockId id;
  std::vector<std::size_t> alpha;  // decoded tuple
  std::size_t robust_row = 0;
  // kConjugate: d equality rows, then the cap rows.
  // kSeparable: d * K epigraph rows ordered (i, k').
  std::size_t first_row = 0;
  std::size_t num_rows = 0;
  // kConjugate: z (support rows), then w_{k,i} (k-major), then Linf
  // auxiliaries s_{k,i}. kSeparable: t_i.
  std::size_t first_col = 0;
};

// Column and row map of an assembled dual LP. Columns: decisions theta,
// then lambda_k, then gamma_{k,j} (k-major), then per-block variables.
// Rows: decision-set rows, then the shared rows of kSeparable (for every
// piece l and coordinate i the pair +a_{l,i} and -a_{l,i}), then the
// blocks in (alpha, l)-major order.
struct DualLayout {
  BlockForm form = BlockForm::kConjugate;
  std::size_t num_theta = 0;
  std::vector<std::size_t> lambda_col;
  std::vector<std::vector<std::size_t>> gamma_col;
  std::vector<BlockLayout> blocks;
};

struct DualLp {
  lp::LpModel model;
  DualLayout layout;
};

// Mixed-radix helpers over A = [N_1] x ... x [N_K].
std::size_t num_multi_indices(const AmbiguitySpec& amb);
std::vector<std::size_t> decode_alpha(const AmbiguitySpec& amb, std::size_t index);

// The full dual LP of the uncertainty quantification problem over every
// block, in conjugate form. Minimization of sum eps_k lambda_k + sum p_kj
// gamma_kj. Throws UnsupportedCost unless the cost is an L1 or Linf norm
// with p = 1, and SizeExceeded when |A| * L exceeds max_blocks.
DualLp build_dual_lp(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                     const Polyhedron& support, std::size_t max_blocks = 200000);

// General assembly used by the solvers: a chosen block subset, the chosen
// form, and an optional decision vector entering the loss affinely.
DualLp assemble_dual_lp(const AmbiguitySpec& amb, const DecisionLoss& loss,
                        const Polyhedron& support, const DecisionSet* decisions,
                        BlockForm form, const std::vector<BlockId>& blocks);

}  // namespace wdro::msdro
