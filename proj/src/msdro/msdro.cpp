#include "wdro/msdro/msdro.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wdro/oracle/moreau.hpp"

namespace wdro::msdro {

namespace {

struct Problem {
  const AmbiguitySpec& amb;
  const DecisionLoss& loss;
  const Polyhedron& support;
  const DecisionSet* decisions;
};

struct DualPoint {
  std::vector<double> theta;
  std::vector<double> lambda;
  std::vector<std::vector<double>> gamma;
};

DualPoint extract(const DualLayout& lay, const std::vector<double>& x) {
  DualPoint p;
  p.theta.assign(x.begin(), x.begin() + static_cast<long>(lay.num_theta));
  for (std::size_t c : lay.lambda_col) p.lambda.push_back(x[c]);
  p.gamma.resize(lay.gamma_col.size());
  for (std::size_t k = 0; k < lay.gamma_col.size(); ++k) {
    for (std::size_t c : lay.gamma_col[k]) p.gamma[k].push_back(x[c]);
  }
  return p;
}

bool closed_form_applies(const Problem& pr) {
  return pr.amb.cost.norm == transport::Norm::kL1 && pr.support.num_rows() == 0;
}

// sup_xi [l_l^theta(xi) - sum_k lambda_k c(xi, xi_{k,alpha_k})]. With
// homogeneous set the constant parts a0, b0 are dropped (recession test).
// choice (closed form only) receives the maximizing anchor per coordinate.
double block_sup(const Problem& pr, const std::vector<std::size_t>& alpha, std::size_t l,
                 std::span<const double> theta, std::span<const double> lambda,
                 bool homogeneous, std::vector<std::size_t>* choice = nullptr) {
  const DecisionPiece& p = pr.loss.pieces[l];
  const std::size_t d = pr.amb.dim();
  const std::size_t K = pr.amb.num_sources();
  double b = homogeneous ? 0.0 : p.b0;
  for (std::size_t j = 0; j < theta.size(); ++j) b += p.c[j] * theta[j];
  std::vector<double> a(d);
  for (std::size_t i = 0; i < d; ++i) {
    a[i] = homogeneous ? 0.0 : p.a0[i];
    for (std::size_t j = 0; j < theta.size(); ++j) a[i] += p.A[i][j] * theta[j];
  }
  if (choice) choice->assign(d, 0);
  for (double v : lambda) {
    if (v < 0.0) return INFINITY;
  }

  if (closed_form_applies(pr)) {
    double total = 0.0;
    for (double v : lambda) total += v;
    double value = b;
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(a[i]) > total * (1.0 + 1e-12) + 1e-12) return INFINITY;
      double best = -INFINITY;
      for (std::size_t kp = 0; kp < K; ++kp) {
        const double x = pr.amb.sources[kp].center.atom(alpha[kp])[i];
        double v = a[i] * x;
        for (std::size_t k = 0; k < K; ++k) {
          v -= lambda[k] * std::abs(x - pr.amb.sources[k].center.atom(alpha[k])[i]);
        }
        if (v > best) {
          best = v;
          if (choice) (*choice)[i] = kp;
        }
      }
      value += best;
    }
    return value;
  }

  std::vector<Point> anchors(K);
  for (std::size_t k = 0; k < K; ++k) anchors[k] = pr.amb.sources[k].center.atom(alpha[k]);
  PiecewiseAffineLoss piece;
  piece.pieces.push_back({a, b});
  const oracle::MoreauResult r =
      oracle::moreau_envelope(lambda, anchors, piece, pr.support, pr.amb.cost);
  return r.finite ? r.value : INFINITY;
}

double gamma_sum(const DualPoint& p, const std::vector<std::size_t>& alpha) {
  double s = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) s += p.gamma[k][alpha[k]];
  return s;
}

BlockForm choose_form(const Problem& pr, FormChoice choice) {
  switch (choice) {
    case FormChoice::kConjugate:
      return BlockForm::kConjugate;
    case FormChoice::kSeparable:
      return BlockForm::kSeparable;
    case FormChoice::kAuto:
      break;
  }
  return closed_form_applies(pr) ? BlockForm::kSeparable : BlockForm::kConjugate;
}

std::size_t encode_alpha(const AmbiguitySpec& amb, const std::vector<std::size_t>& alpha) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    index = index * amb.sources[k].center.size() + alpha[k];
  }
  return index;
}

// Each atom of each center paired with its nearest atom in every other center.
std::vector<BlockId> initial_blocks(const Problem& pr) {
  const std::size_t K = pr.amb.num_sources();
  std::set<BlockId> out;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& ck = pr.amb.sources[k].center;
    for (std::size_t j = 0; j < ck.size(); ++j) {
      std::vector<std::size_t> alpha(K);
      for (std::size_t kp = 0; kp < K; ++kp) {
        if (kp == k) {
          alpha[kp] = j;
          continue;
        }
        const auto& other = pr.amb.sources[kp].center;
        double best = INFINITY;
        for (std::size_t jp = 0; jp < other.size(); ++jp) {
          const double c = pr.amb.cost(ck.atom(j), other.atom(jp));
          if (c < best) {
            best = c;
            alpha[kp] = jp;
          }
        }
      }
      const std::size_t index = encode_alpha(pr.amb, alpha);
      for (std::size_t l = 0; l < pr.loss.pieces.size(); ++l) out.insert({index, l});
    }
  }
  return {out.begin(), out.end()};
}

struct Solved {
  DualLp dual;
  lp::LpSolution sol;
  std::vector<BlockId> blocks;
};

double objective_slope(const AmbiguitySpec& amb, const DualPoint& ray) {
  double s = 0.0;
  for (std::size_t k = 0; k < amb.num_sources(); ++k) {
    s += amb.sources[k].radius * ray.lambda[k];
    for (std::size_t j = 0; j < ray.gamma[k].size(); ++j) {
      s += amb.sources[k].center.prob(j) * ray.gamma[k][j];
    }
  }
  return s;
}

// A point feasible for every robust block of a decision-free problem:
// lambda large enough that every envelope is finite, gamma on source 1.
DualPoint feasible_point(const Problem& pr) {
  const std::size_t K = pr.amb.num_sources();
  const std::size_t d = pr.amb.dim();
  const transport::Norm dual = transport::dual_norm(pr.amb.cost.norm);
  double slope = 0.0;
  for (const DecisionPiece& p : pr.loss.pieces) {
    slope = std::max(slope, transport::norm(p.a0, dual));
  }
  DualPoint pt;
  pt.lambda.assign(K, slope / static_cast<double>(K) + 1.0);
  pt.gamma.resize(K);
  for (std::size_t k = 0; k < K; ++k) pt.gamma[k].assign(pr.amb.sources[k].center.size(), 0.0);
  pt.gamma[0].assign(pr.amb.sources[0].center.size(), -INFINITY);
  const std::size_t total = num_multi_indices(pr.amb);
  for (std::size_t a = 0; a < total; ++a) {
    const auto alpha = decode_alpha(pr.amb, a);
    for (std::size_t l = 0; l < pr.loss.pieces.size(); ++l) {
      const double v = block_sup(pr, alpha, l, {}, pt.lambda, false);
      pt.gamma[0][alpha[0]] = std::max(pt.gamma[0][alpha[0]], v);
    }
  }
  (void)d;
  return pt;
}

DualSolution to_solution(const AmbiguitySpec& amb, const DualPoint& p) {
  DualSolution s;
  s.lambda = p.lambda;
  s.gamma = p.gamma;
  s.value = dual_objective(amb, s);
  return s;
}

[[noreturn]] void throw_empty(const Problem& pr, const DualPoint& base, DualPoint ray) {
  double scale = 0.0;
  for (double v : ray.lambda) scale = std::max(scale, std::abs(v));
  for (const auto& g : ray.gamma) {
    for (double v : g) scale = std::max(scale, std::abs(v));
  }
  if (scale > 0.0) {
    for (double& v : ray.lambda) v /= scale;
    for (auto& g : ray.gamma) {
      for (double& v : g) v /= scale;
    }
  }
  InfeasibilityCertificate cert;
  cert.lambda_inf = ray.lambda;
  cert.gamma_inf = ray.gamma;
  cert.slope = objective_slope(pr.amb, ray);

  DualPoint start = base;
  if (pr.decisions == nullptr) {
    bool feasible = true;
    const std::size_t total = num_multi_indices(pr.amb);
    for (std::size_t a = 0; a < total && feasible; ++a) {
      const auto alpha = decode_alpha(pr.amb, a);
      for (std::size_t l = 0; l < pr.loss.pieces.size(); ++l) {
        if (block_sup(pr, alpha, l, {}, start.lambda, false) - gamma_sum(start, alpha) > 1e-7) {
          feasible = false;
          break;
        }
      }
    }
    if (!feasible) start = feasible_point(pr);
  }
  cert.base = to_solution(pr.amb, start);
  throw IntersectionEmpty("the transport balls have empty intersection", std::move(cert));
}

struct Cut {
  std::size_t alpha;
  std::size_t piece;
  std::vector<std::size_t> choice;
  auto operator<=>(const Cut&) const = default;
};

DualLp build_cut_lp(const Problem& pr, const std::vector<Cut>& cuts) {
  const AmbiguitySpec& amb = pr.amb;
  const std::size_t d = amb.dim();
  const std::size_t K = amb.num_sources();
  const std::size_t n = pr.loss.num_decisions;
  DualLp out;
  DualLayout& lay = out.layout;
  lay.form = BlockForm::kSeparable;
  lay.num_theta = n;
  lp::LpBuilder b(lp::ObjectiveSense::kMinimize);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = -lp::kInf, up = lp::kInf;
    if (pr.decisions && !pr.decisions->lower.empty()) lo = pr.decisions->lower[j];
    if (pr.decisions && !pr.decisions->upper.empty()) up = pr.decisions->upper[j];
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
  if (pr.decisions) {
    const Polyhedron& D = pr.decisions->rows;
    for (std::size_t r = 0; r < D.num_rows(); ++r) {
      if (D.C[r].size() != n) throw DimensionMismatch("decision set row dimension");
      const auto row = b.add_row(lp::RowSense::kLessEqual, D.g[r]);
      for (std::size_t j = 0; j < n; ++j) b.add_coefficient(row, j, D.C[r][j]);
    }
  }
  for (const DecisionPiece& p : pr.loss.pieces) {
    for (std::size_t i = 0; i < d; ++i) {
      for (double sign : {1.0, -1.0}) {
        const auto row = b.add_row(lp::RowSense::kLessEqual, -sign * p.a0[i]);
        for (std::size_t j = 0; j < n; ++j) b.add_coefficient(row, j, sign * p.A[i][j]);
        for (std::size_t k = 0; k < K; ++k) b.add_coefficient(row, lay.lambda_col[k], -1.0);
      }
    }
  }
  std::vector<double> theta_coef(n), lambda_coef(K);
  for (const Cut& cut : cuts) {
    const DecisionPiece& p = pr.loss.pieces[cut.piece];
    const auto alpha = decode_alpha(amb, cut.alpha);
    double rhs = -p.b0;
    theta_coef = p.c;
    std::fill(lambda_coef.begin(), lambda_coef.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t kp = cut.choice[i];
      const double x = amb.sources[kp].center.atom(alpha[kp])[i];
      rhs -= p.a0[i] * x;
      for (std::size_t j = 0; j < n; ++j) theta_coef[j] += p.A[i][j] * x;
      for (std::size_t k = 0; k < K; ++k) {
        lambda_coef[k] -= std::abs(x - amb.sources[k].center.atom(alpha[k])[i]);
      }
    }
    const auto row = b.add_row(lp::RowSense::kLessEqual, rhs);
    for (std::size_t j = 0; j < n; ++j) {
      if (theta_coef[j] != 0.0) b.add_coefficient(row, j, theta_coef[j]);
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (lambda_coef[k] != 0.0) b.add_coefficient(row, lay.lambda_col[k], lambda_coef[k]);
      b.add_coefficient(row, lay.gamma_col[k][alpha[k]], -1.0);
    }
  }
  out.model = b.build();
  return out;
}

Solved solve_cuts(const Problem& pr, const SolveOptions& opt, SolveStats* stats) {
  const std::size_t d = pr.amb.dim();
  const std::size_t K = pr.amb.num_sources();
  const std::size_t L = pr.loss.pieces.size();
  const std::size_t total = num_multi_indices(pr.amb);

  std::vector<Cut> cuts;
  std::set<Cut> known;
  auto add = [&](Cut c) {
    if (known.insert(c).second) {
      cuts.push_back(std::move(c));
      return true;
    }
    return false;
  };
  std::vector<BlockId> seed;
  if (opt.blocks && !opt.blocks->empty()) {
    seed = *opt.blocks;
  } else {
    seed = initial_blocks(pr);
  }
  for (const BlockId& id : seed) {
    if (id.alpha >= total || id.piece >= L) throw InvalidArgument("block index out of range");
    for (std::size_t kp = 0; kp < K; ++kp) add({id.alpha, id.piece, std::vector<std::size_t>(d, kp)});
  }

  SolveStats local;
  local.total_blocks = total * L;
  std::vector<lp::BasisStatus> basis;
  std::vector<std::size_t> choice;
  auto finish = [&](Solved s) {
    local.blocks = cuts.size();
    if (stats) *stats = local;
    if (opt.blocks) {
      std::set<BlockId> used;
      for (const Cut& c : cuts) used.insert({c.alpha, c.piece});
      opt.blocks->assign(used.begin(), used.end());
    }
    return s;
  };
  for (std::size_t round = 0;; ++round) {
    if (round >= opt.max_rounds) throw NumericalFailure("cut generation did not converge");
    Solved s{build_cut_lp(pr, cuts), {}, {}};
    s.sol = basis.empty() ? lp::solve_lp(s.dual.model, opt.lp)
                          : lp::solve_lp(s.dual.model, opt.lp, basis);
    basis = s.sol.basis;
    local.rounds = round + 1;
    local.lp_iterations += s.sol.iterations;
    if (s.sol.status == lp::Status::kInfeasible) {
      throw InvalidArgument("decision set is empty");
    }

    std::vector<std::pair<double, Cut>> violated;
    const bool unbounded = s.sol.status == lp::Status::kUnbounded;
    DualPoint pt = extract(s.dual.layout, unbounded ? s.sol.primal_ray : s.sol.primal);
    for (double& v : pt.lambda) v = std::max(v, 0.0);
    const double tol =
        unbounded ? 1e-9 : opt.violation_tol * (1.0 + std::abs(s.sol.objective));
    for (std::size_t a = 0; a < total; ++a) {
      const auto alpha = decode_alpha(pr.amb, a);
      for (std::size_t l = 0; l < L; ++l) {
        const double v = block_sup(pr, alpha, l, pt.theta, pt.lambda, unbounded, &choice) -
                         gamma_sum(pt, alpha);
        if (v > tol) violated.emplace_back(v, Cut{a, l, choice});
      }
    }
    std::stable_sort(violated.begin(), violated.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    std::size_t added = 0;
    for (auto& [v, cut] : violated) {
      if (added >= opt.max_cuts_per_round) break;
      if (add(std::move(cut))) ++added;
    }
    if (added > 0) continue;
    if (!unbounded) return finish(std::move(s));
    double theta_norm = 0.0;
    for (double v : pt.theta) theta_norm = std::max(theta_norm, std::abs(v));
    if (theta_norm > 1e-9) {
      throw NumericalFailure("worst-case objective is unbounded below over the decisions");
    }
    local.blocks = cuts.size();
    if (stats) *stats = local;
    throw_empty(pr, extract(s.dual.layout, s.sol.primal), pt);
  }
}

Solved solve_dual(const Problem& pr, const SolveOptions& opt, SolveStats* stats) {
  pr.amb.validate();
  const std::size_t d = pr.amb.dim();
  const std::size_t K = pr.amb.num_sources();
  const std::size_t L = pr.loss.pieces.size();
  pr.loss.validate(d);
  pr.support.validate(d);
  const BlockForm form = choose_form(pr, opt.form);

  const std::size_t total = num_multi_indices(pr.amb);
  if (L == 0 || total > opt.max_blocks / L) {
    throw SizeExceeded("too many robust blocks for the dual LP");
  }
  const bool linf = pr.amb.cost.norm == transport::Norm::kLinf;
  const std::size_t rows_per_block =
      form == BlockForm::kSeparable
          ? 1 + d * K
          : 1 + d + (linf ? K * (2 * d + 1) : 2 * d * K);
  bool full = opt.strategy == Strategy::kFullModel;
  if (opt.strategy == Strategy::kAuto) {
    full = total * L <= opt.full_model_max_rows / rows_per_block;
  }

  if (!full && (opt.strategy == Strategy::kCutGeneration ||
                (opt.strategy == Strategy::kAuto && form == BlockForm::kSeparable))) {
    if (!closed_form_applies(pr)) {
      throw InvalidArgument("cut generation needs an L1 cost on the whole space");
    }
    return solve_cuts(pr, opt, stats);
  }

  std::set<BlockId> active;
  if (full) {
    for (std::size_t a = 0; a < total; ++a) {
      for (std::size_t l = 0; l < L; ++l) active.insert({a, l});
    }
  } else if (opt.blocks && !opt.blocks->empty()) {
    active.insert(opt.blocks->begin(), opt.blocks->end());
  } else {
    const auto init = initial_blocks(pr);
    active.insert(init.begin(), init.end());
  }

  SolveStats local;
  local.total_blocks = total * L;
  for (std::size_t round = 0;; ++round) {
    if (round >= opt.max_rounds) throw NumericalFailure("block generation did not converge");
    std::vector<BlockId> blocks(active.begin(), active.end());
    Solved s{assemble_dual_lp(pr.amb, pr.loss, pr.support, pr.decisions, form, blocks),
             {}, blocks};
    s.sol = lp::solve_lp(s.dual.model, opt.lp);
    local.rounds = round + 1;
    local.blocks = blocks.size();
    local.lp_iterations += s.sol.iterations;
    if (s.sol.status == lp::Status::kInfeasible) {
      throw InvalidArgument("decision set is empty");
    }

    std::vector<std::pair<double, BlockId>> violated;
    if (s.sol.status == lp::Status::kUnbounded) {
      const DualPoint ray = extract(s.dual.layout, s.sol.primal_ray);
      if (!full) {
        for (std::size_t a = 0; a < total; ++a) {
          std::vector<std::size_t> alpha;
          for (std::size_t l = 0; l < L; ++l) {
            if (active.count({a, l})) continue;
            if (alpha.empty()) alpha = decode_alpha(pr.amb, a);
            const double v = block_sup(pr, alpha, l, ray.theta, ray.lambda, true) -
                             gamma_sum(ray, alpha);
            if (v > 1e-9) violated.emplace_back(v, BlockId{a, l});
          }
        }
      }
      if (violated.empty()) {
        double theta_norm = 0.0;
        for (double v : ray.theta) theta_norm = std::max(theta_norm, std::abs(v));
        if (theta_norm > 1e-9) {
          throw NumericalFailure("worst-case objective is unbounded below over the decisions");
        }
        if (stats) *stats = local;
        throw_empty(pr, extract(s.dual.layout, s.sol.primal), ray);
      }
    } else {
      if (full) {
        if (stats) *stats = local;
        if (opt.blocks) *opt.blocks = blocks;
        return s;
      }
      const DualPoint pt = extract(s.dual.layout, s.sol.primal);
      const double tol = opt.violation_tol * (1.0 + std::abs(s.sol.objective));
      for (std::size_t a = 0; a < total; ++a) {
        std::vector<std::size_t> alpha;
        for (std::size_t l = 0; l < L; ++l) {
          if (active.count({a, l})) continue;
          if (alpha.empty()) alpha = decode_alpha(pr.amb, a);
          const double v =
              block_sup(pr, alpha, l, pt.theta, pt.lambda, false) - gamma_sum(pt, alpha);
          if (v > tol) violated.emplace_back(v, BlockId{a, l});
        }
      }
      if (violated.empty()) {
        if (stats) *stats = local;
        if (opt.blocks) *opt.blocks = blocks;
        return s;
      }
    }
    std::stable_sort(violated.begin(), violated.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    const std::size_t take = std::min(violated.size(), opt.max_blocks_per_round);
    for (std::size_t i = 0; i < take; ++i) active.insert(violated[i].second);
  }
}

}  // namespace

double dual_objective(const AmbiguitySpec& amb, const DualSolution& point) {
  double s = 0.0;
  for (std::size_t k = 0; k < amb.num_sources(); ++k) {
    s += amb.sources[k].radius * point.lambda[k];
    for (std::size_t j = 0; j < point.gamma[k].size(); ++j) {
      s += amb.sources[k].center.prob(j) * point.gamma[k][j];
    }
  }
  return s;
}

double max_robust_violation(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                            const Polyhedron& support, const DualSolution& point) {
  amb.validate();
  const DecisionLoss dl = DecisionLoss::constant(loss);
  const Problem pr{amb, dl, support, nullptr};
  DualPoint pt{{}, point.lambda, point.gamma};
  double worst = -INFINITY;
  const std::size_t total = num_multi_indices(amb);
  for (std::size_t a = 0; a < total; ++a) {
    const auto alpha = decode_alpha(amb, a);
    for (std::size_t l = 0; l < loss.pieces.size(); ++l) {
      worst = std::max(worst, block_sup(pr, alpha, l, {}, pt.lambda, false) -
                                  gamma_sum(pt, alpha));
    }
  }
  return worst;
}

DualSolution worst_case_value(const AmbiguitySpec& amb, const PiecewiseAffineLoss& loss,
                              const Polyhedron& support, const SolveOptions& options,
                              SolveStats* stats) {
  const DecisionLoss dl = DecisionLoss::constant(loss);
  const Problem pr{amb, dl, support, nullptr};
  const Solved s = solve_dual(pr, options, stats);
  DualSolution out = to_solution(amb, extract(s.dual.layout, s.sol.primal));
  out.value = s.sol.objective;
  return out;
}

WorstCaseDistribution worst_case_distribution(const AmbiguitySpec& amb,
                                              const PiecewiseAffineLoss& loss,
                                              const Polyhedron& support,
                                              const SolveOptions& options) {
  const DecisionLoss dl = DecisionLoss::constant(loss);
  const Problem pr{amb, dl, support, nullptr};
  SolveOptions opt = options;
  if (opt.form == FormChoice::kAuto) opt.form = FormChoice::kConjugate;
  const Solved s = solve_dual(pr, opt, nullptr);
  const DualLayout& lay = s.dual.layout;
  const std::size_t K = amb.num_sources();
  const std::size_t d = amb.dim();

  // Candidate atoms: xi = (multiplier of the block's coupling rows) / mu.
  struct Candidate {
    Point xi;
    std::vector<std::size_t> alpha;
  };
  std::vector<Candidate> cands;
  double mass = 0.0;
  for (const BlockLayout& bl : lay.blocks) {
    const double mu = -s.sol.dual[bl.robust_row];
    if (mu <= 1e-12) continue;
    mass += mu;
    Point xi(d, 0.0);
    if (lay.form == BlockForm::kConjugate) {
      for (std::size_t i = 0; i < d; ++i) xi[i] = -s.sol.dual[bl.first_row + i] / mu;
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t kp = 0; kp < K; ++kp) {
          const double pi = -s.sol.dual[bl.first_row + i * K + kp];
          xi[i] += pi * amb.sources[kp].center.atom(bl.alpha[kp])[i];
        }
        xi[i] /= mu;
      }
    }
    cands.push_back({std::move(xi), bl.alpha});
  }
  if (mass < 1.0 - 1e-6) {
    throw RecoveryDegenerate("robust-row multipliers sum to less than one");
  }

  // Transport-feasibility LP over the candidates; a basic optimum keeps at
  // most 1 + sum_k N_k of them.
  lp::LpBuilder b(lp::ObjectiveSense::kMaximize);
  std::vector<std::vector<std::size_t>> marginal_row(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < amb.sources[k].center.size(); ++j) {
      marginal_row[k].push_back(b.add_row(lp::RowSense::kEqual, amb.sources[k].center.prob(j)));
    }
  }
  std::vector<std::size_t> budget_row(K);
  for (std::size_t k = 0; k < K; ++k) {
    budget_row[k] = b.add_row(lp::RowSense::kLessEqual, amb.sources[k].radius + 1e-9);
  }
  for (const Candidate& c : cands) {
    const auto v = b.add_variable(0.0, lp::kInf, loss(c.xi));
    for (std::size_t k = 0; k < K; ++k) {
      b.add_coefficient(marginal_row[k][c.alpha[k]], v, 1.0);
      b.add_coefficient(budget_row[k], v, amb.cost(c.xi, amb.sources[k].center.atom(c.alpha[k])));
    }
  }
  const lp::LpSolution sparse = lp::solve_lp(b.build());
  if (sparse.status != lp::Status::kOptimal) {
    throw RecoveryDegenerate("recovered atoms do not form a feasible coupling");
  }
  // On unbounded supports the supremum can be approached only by sending
  // vanishing mass to infinity; no finite distribution attains it.
  if (sparse.objective < s.sol.objective - 1e-6 * (1.0 + std::abs(s.sol.objective))) {
    throw RecoveryDegenerate("worst case is not attained by a discrete distribution");
  }

  WorstCaseDistribution out;
  out.support_bound = 1;
  for (const Source& src : amb.sources) out.support_bound += src.center.size();
  out.budgets_used.assign(K, 0.0);
  std::vector<Point> atoms;
  std::vector<double> probs;
  double total = 0.0;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const double q = sparse.primal[c];
    if (q <= 1e-13) continue;
    total += q;
    for (std::size_t k = 0; k < K; ++k) {
      out.budgets_used[k] +=
          q * amb.cost(cands[c].xi, amb.sources[k].center.atom(cands[c].alpha[k]));
    }
    auto same = [&](const Point& y) {
      for (std::size_t i = 0; i < d; ++i) {
        if (std::abs(cands[c].xi[i] - y[i]) > 1e-10) return false;
      }
      return true;
    };
    const auto it = std::find_if(atoms.begin(), atoms.end(), same);
    if (it == atoms.end()) {
      atoms.push_back(cands[c].xi);
      probs.push_back(q);
    } else {
      probs[static_cast<std::size_t>(it - atoms.begin())] += q;
    }
  }
  for (double& p : probs) p /= total;
  out.distribution = DiscreteDistribution(std::move(atoms), std::move(probs));
  return out;
}

MsdroSolution solve_msdro(const AmbiguitySpec& amb, const DecisionLoss& loss,
                          const DecisionSet& decisions, const Polyhedron& support,
                          const SolveOptions& options) {
  const Problem pr{amb, loss, support, &decisions};
  MsdroSolution out;
  const Solved s = solve_dual(pr, options, &out.stats);
  const DualPoint pt = extract(s.dual.layout, s.sol.primal);
  out.theta = pt.theta;
  out.value = s.sol.objective;
  out.dual = to_solution(amb, pt);
  out.dual.value = s.sol.objective;
  return out;
}

}  // namespace wdro::msdro
