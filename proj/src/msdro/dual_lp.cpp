#include "wdro/msdro/dual_lp.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wdro::msdro {

namespace {

void check_cost(const GroundCost& cost) {
  if (cost.kind != GroundCost::Kind::kNormPower || cost.p != 1 ||
      cost.norm == transport::Norm::kL2) {
    throw UnsupportedCost("dual LP needs an L1 or Linf transport cost with p = 1");
  }
}

}  // namespace

std::size_t num_multi_indices(const AmbiguitySpec& amb) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t count = 1;
  for (const Source& s : amb.sources) {
    if (count > kMax / s.center.size()) return kMax;
    count *= s.center.size();
  }
  return count;
}

std::vector<std::size_t> decode_alpha(const AmbiguitySpec& amb, std::size_t index) {
  const std::size_t K = amb.num_sources();
  std::vector<std::size_t> alpha(K);
  for (std::size_t k = K; k-- > 0;) {
    const std::size_t n = amb.sources[k].center.size();
    alpha[k] = index % n;
    index /= n;
  }
  return alpha;
}

DualLp assemble_dual_lp(const AmbiguitySpec& amb, const DecisionLoss& loss,
                        const Polyhedron& support, const DecisionSet* decisions,
                        BlockForm form, const std::vector<BlockId>& blocks) {
  amb.validate();
  check_cost(amb.cost);
  const std::size_t d = amb.dim();
  const std::size_t K = amb.num_sources();
  const std::size_t n = loss.num_decisions;
  const std::size_t L = loss.pieces.size();
  loss.validate(d);
  support.validate(d);
  if (form == BlockForm::kSeparable &&
      (amb.cost.norm != transport::Norm::kL1 || support.num_rows() != 0)) {
    throw InvalidArgument("separable blocks need an L1 cost on the whole space");
  }
  const bool linf = amb.cost.norm == transport::Norm::kLinf;
  const std::size_t m = support.num_rows();

  DualLp out;
  DualLayout& lay = out.layout;
  lay.form = form;
  lay.num_theta = n;
  lp::LpBuilder b(lp::ObjectiveSense::kMinimize);

  for (std::size_t j = 0; j < n; ++j) {
    double lo = -lp::kInf, up = lp::kInf;
    if (decisions && !decisions->lower.empty()) lo = decisions->lower[j];
    if (decisions && !decisions->upper.empty()) up = decisions->upper[j];
    b.add_variable(lo, up, 0.0);
  }
  for (std::size_t k = 0; k < K; ++k) {
    lay.lambda_col.push_back(b.add_variable(0.0, lp::kInf, amb.sources[k].radius));
  }
  lay.gamma_col.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& center = amb.sources[k].center;
    for (std::size_t j = 0; j < center.size(); ++j) {
      lay.gamma_col[k].push_back(b.add_variable(-lp::kInf, lp::kInf, center.prob(j)));
    }
  }

  if (decisions) {
    const Polyhedron& D = decisions->rows;
    for (std::size_t r = 0; r < D.num_rows(); ++r) {
      if (D.C[r].size() != n) throw DimensionMismatch("decision set row dimension");
      const auto row = b.add_row(lp::RowSense::kLessEqual, D.g[r]);
      for (std::size_t j = 0; j < n; ++j) b.add_coefficient(row, j, D.C[r][j]);
    }
  }

  if (form == BlockForm::kSeparable) {
    for (std::size_t l = 0; l < L; ++l) {
      const DecisionPiece& p = loss.pieces[l];
      for (std::size_t i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
          const auto row = b.add_row(lp::RowSense::kLessEqual, -sign * p.a0[i]);
          for (std::size_t j = 0; j < n; ++j) b.add_coefficient(row, j, sign * p.A[i][j]);
          for (std::size_t k = 0; k < K; ++k) b.add_coefficient(row, lay.lambda_col[k], -1.0);
        }
      }
    }
  }

  const std::size_t total = num_multi_indices(amb);
  std::vector<const Point*> anchors(K);
  for (const BlockId& id : blocks) {
    if (id.alpha >= total || id.piece >= L) throw InvalidArgument("block index out of range");
    const DecisionPiece& p = loss.pieces[id.piece];
    BlockLayout bl;
    bl.id = id;
    bl.alpha = decode_alpha(amb, id.alpha);
    for (std::size_t k = 0; k < K; ++k) anchors[k] = &amb.sources[k].center.atom(bl.alpha[k]);

    bl.robust_row = b.add_row(lp::RowSense::kLessEqual, -p.b0);
    for (std::size_t j = 0; j < n; ++j) b.add_coefficient(bl.robust_row, j, p.c[j]);
    for (std::size_t k = 0; k < K; ++k) {
      b.add_coefficient(bl.robust_row, lay.gamma_col[k][bl.alpha[k]], -1.0);
    }
    bl.first_row = b.num_rows();
    bl.first_col = b.num_cols();

    if (form == BlockForm::kSeparable) {
      for (std::size_t i = 0; i < d; ++i) {
        const auto t = b.add_variable(-lp::kInf, lp::kInf, 0.0);
        b.add_coefficient(bl.robust_row, t, 1.0);
        for (std::size_t kp = 0; kp < K; ++kp) {
          // t_i >= a_{l,i}(theta) x - sum_k lambda_k |x - xi_{k,i}|, x = xi_{k',i}.
          const double x = (*anchors[kp])[i];
          const auto row = b.add_row(lp::RowSense::kLessEqual, -p.a0[i] * x);
          for (std::size_t j = 0; j < n; ++j) b.add_coefficient(row, j, p.A[i][j] * x);
          for (std::size_t k = 0; k < K; ++k) {
            b.add_coefficient(row, lay.lambda_col[k], -std::abs(x - (*anchors[k])[i]));
          }
          b.add_coefficient(row, t, -1.0);
        }
      }
    } else {
      std::vector<std::size_t> z(m), w(K * d);
      for (std::size_t r = 0; r < m; ++r) {
        z[r] = b.add_variable(0.0, lp::kInf, 0.0);
        b.add_coefficient(bl.robust_row, z[r], support.g[r]);
      }
      for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
          w[k * d + i] = b.add_variable(-lp::kInf, lp::kInf, 0.0);
          b.add_coefficient(bl.robust_row, w[k * d + i], (*anchors[k])[i]);
        }
      }
      // A_l theta - C'z - sum_k w_k = -a0_l.
      for (std::size_t i = 0; i < d; ++i) {
        const auto row = b.add_row(lp::RowSense::kEqual, -p.a0[i]);
        for (std::size_t j = 0; j < n; ++j) b.add_coefficient(row, j, p.A[i][j]);
        for (std::size_t r = 0; r < m; ++r) b.add_coefficient(row, z[r], -support.C[r][i]);
        for (std::size_t k = 0; k < K; ++k) b.add_coefficient(row, w[k * d + i], -1.0);
      }
      for (std::size_t k = 0; k < K; ++k) {
        if (!linf) {
          // ||w_k||_inf <= lambda_k.
          for (std::size_t i = 0; i < d; ++i) {
            for (double sign : {1.0, -1.0}) {
              const auto row = b.add_row(lp::RowSense::kLessEqual, 0.0);
              b.add_coefficient(row, w[k * d + i], sign);
              b.add_coefficient(row, lay.lambda_col[k], -1.0);
            }
          }
        } else {
          // ||w_k||_1 <= lambda_k through s_{k,i} >= |w_{k,i}|.
          const auto budget = b.add_row(lp::RowSense::kLessEqual, 0.0);
          b.add_coefficient(budget, lay.lambda_col[k], -1.0);
          for (std::size_t i = 0; i < d; ++i) {
            const auto s = b.add_variable(0.0, lp::kInf, 0.0);
            b.add_coefficient(budget, s, 1.0);
            for (double sign : {1.0, -1.0}) {
              const auto row = b.add_row(lp::RowSense::kLessEqual, 0.0);
              b.add_coefficient(row, w[k * d + i], sign);
              b.add_coefficient(row, s, -1.0);
            }
          }
        }
      }
    }
    bl.num_rows = b.num_rows() - bl.first_row;
    lay.blocks.push_back(std::move(bl));
  }

  out.model = b.build();
  return out;
}

DualLp build_dual_lp(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                     const Polyhedron& support, std::size_t max_blocks) {
  amb.validate();
  check_cost(amb.cost);
  const std::size_t total = num_multi_indices(amb);
  const std::size_t L = loss.pieces.size();
  if (L == 0) throw InvalidArgument("loss needs at least one piece");
  if (total > max_blocks / L) {
    throw SizeExceeded("dual LP would have more than " + std::to_string(max_blocks) +
                       " robust blocks");
  }
  std::vector<BlockId> blocks;
  blocks.reserve(total * L);
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t l = 0; l < L; ++l) blocks.push_back({a, l});
  }
  return assemble_dual_lp(amb, DecisionLoss::constant(loss), support, nullptr,
                          BlockForm::kConjugate, blocks);
}

}  // namespace wdro::msdro
