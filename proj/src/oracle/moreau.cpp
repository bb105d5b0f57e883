#include "wdro/oracle/moreau.hpp"

#include <cmath>

#include "wdro/lp/simplex.hpp"

namespace wdro::oracle {

bool Halfspace::contains(std::span<const double> x, double tol) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += normal[i] * x[i];
  return s <= offset + tol;
}

namespace {

// max <a, xi> - sum_k lambda_k ||xi - anchor_k|| over C xi <= g.
// Columns: xi (d, free), then per-source distance variables.
lp::LpModel epigraph_lp(std::span<const double> lambda,
                        const std::vector<Point>& anchors,
                        std::span<const double> a, const Polyhedron& support,
                        transport::Norm norm) {
  const std::size_t d = a.size();
  const std::size_t K = anchors.size();
  lp::LpBuilder b(lp::ObjectiveSense::kMaximize);
  for (std::size_t i = 0; i < d; ++i) b.add_variable(-lp::kInf, lp::kInf, a[i]);
  for (std::size_t k = 0; k < K; ++k) {
    if (norm == transport::Norm::kL1) {
      // u_{k,i} >= |xi_i - anchor_{k,i}|.
      for (std::size_t i = 0; i < d; ++i) {
        const auto u = b.add_variable(0.0, lp::kInf, -lambda[k]);
        const auto r1 = b.add_row(lp::RowSense::kLessEqual, anchors[k][i]);
        b.add_coefficient(r1, i, 1.0);
        b.add_coefficient(r1, u, -1.0);
        const auto r2 = b.add_row(lp::RowSense::kLessEqual, -anchors[k][i]);
        b.add_coefficient(r2, i, -1.0);
        b.add_coefficient(r2, u, -1.0);
      }
    } else {
      // s_k >= |xi_i - anchor_{k,i}| for every i.
      const auto s = b.add_variable(0.0, lp::kInf, -lambda[k]);
      for (std::size_t i = 0; i < d; ++i) {
        const auto r1 = b.add_row(lp::RowSense::kLessEqual, anchors[k][i]);
        b.add_coefficient(r1, i, 1.0);
        b.add_coefficient(r1, s, -1.0);
        const auto r2 = b.add_row(lp::RowSense::kLessEqual, -anchors[k][i]);
        b.add_coefficient(r2, i, -1.0);
        b.add_coefficient(r2, s, -1.0);
      }
    }
  }
  for (std::size_t r = 0; r < support.num_rows(); ++r) {
    const auto row = b.add_row(lp::RowSense::kLessEqual, support.g[r]);
    for (std::size_t i = 0; i < d; ++i) b.add_coefficient(row, i, support.C[r][i]);
  }
  return b.build();
}

}  // namespace

MoreauResult moreau_envelope(std::span<const double> lambda,
                             const std::vector<Point>& anchors,
                             const PiecewiseAffineLoss& loss,
                             const Polyhedron& support, const GroundCost& cost) {
  if (lambda.size() != anchors.size()) {
    throw DimensionMismatch("moreau_envelope: one multiplier per anchor");
  }
  for (double l : lambda) {
    if (l < 0.0) throw NegativeLambda("moreau_envelope: lambda must be nonnegative");
  }
  if (cost.kind != GroundCost::Kind::kNormPower || cost.p != 1 ||
      cost.norm == transport::Norm::kL2) {
    throw UnsupportedCost("moreau_envelope: only L1 and Linf costs with p = 1");
  }
  const std::size_t d = loss.dim();
  for (const Point& x : anchors) {
    if (x.size() != d) throw DimensionMismatch("moreau_envelope: anchor dimension");
  }

  MoreauResult best;
  best.value = -INFINITY;
  for (std::size_t l = 0; l < loss.pieces.size(); ++l) {
    const lp::LpModel model =
        epigraph_lp(lambda, anchors, loss.pieces[l].a, support, cost.norm);
    const lp::LpSolution sol = lp::solve_lp(model);
    if (sol.status == lp::Status::kInfeasible) {
      throw InvalidArgument("moreau_envelope: support set is empty");
    }
    if (sol.status == lp::Status::kUnbounded) {
      Point u(sol.primal_ray.begin(), sol.primal_ray.begin() + static_cast<long>(d));
      const double scale = transport::norm(u, cost.norm);
      MoreauResult out;
      out.finite = false;
      out.value = INFINITY;
      out.piece = l;
      out.halfspace.normal.assign(lambda.size(), -1.0);
      double slope = 0.0;
      for (std::size_t i = 0; i < d; ++i) slope += loss.pieces[l].a[i] * u[i];
      out.halfspace.offset = scale > 0.0 ? -slope / scale : -slope;
      return out;
    }
    Point xi(sol.primal.begin(), sol.primal.begin() + static_cast<long>(d));
    double value = loss(xi);
    for (std::size_t k = 0; k < anchors.size(); ++k) {
      if (lambda[k] != 0.0) value -= lambda[k] * cost(xi, anchors[k]);
    }
    if (value > best.value) {
      best.value = value;
      best.maximizer = std::move(xi);
      best.piece = l;
    }
  }
  return best;
}

}  // namespace wdro::oracle
