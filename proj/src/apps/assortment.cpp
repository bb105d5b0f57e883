#include "wdro/apps/assortment.hpp"

#include <cmath>

#include "wdro/msdro/dual_lp.hpp"

namespace wdro::apps {

void AssortmentSpec::validate() const {
  ambiguity.validate();
  if (prices.size() != ambiguity.dim()) {
    throw DimensionMismatch("assortment: one price per product is required");
  }
  for (double p : prices) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidArgument("assortment: prices must be finite and nonnegative");
    }
  }
  if (capacity > prices.size()) throw InvalidArgument("assortment: capacity exceeds d");
  if (ambiguity.cost.kind != transport::GroundCost::Kind::kNormPower ||
      ambiguity.cost.norm != transport::Norm::kL1 || ambiguity.cost.p != 1) {
    throw UnsupportedCost("assortment: the transport cost must be the L1 norm");
  }
}

msdro::DecisionLoss assortment_loss(const AssortmentSpec& spec) {
  const std::size_t d = spec.prices.size();
  msdro::DecisionLoss loss;
  loss.num_decisions = d;
  msdro::DecisionPiece piece;
  piece.A.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) piece.A[i][i] = -spec.prices[i];
  piece.a0.assign(d, 0.0);
  piece.c.assign(d, 0.0);
  loss.pieces.push_back(std::move(piece));
  return loss;
}

msdro::Polyhedron demand_support(std::size_t dim) {
  msdro::Polyhedron P;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> row(dim, 0.0);
    row[i] = -1.0;
    P.C.push_back(std::move(row));
    P.g.push_back(0.0);
  }
  return P;
}

namespace {

[[noreturn]] void report_empty(const AssortmentSpec& spec) {
  msdro::PiecewiseAffineLoss zero;
  zero.pieces.push_back({std::vector<double>(spec.prices.size(), 0.0), 0.0});
  msdro::worst_case_value(spec.ambiguity, zero, demand_support(spec.prices.size()));
  throw NumericalFailure("assortment: dual LP unbounded for nonempty ambiguity set");
}

}  // namespace

AssortmentResult assortment_solve(const AssortmentSpec& spec,
                                  const lp::EnumerationOptions& options) {
  spec.validate();
  const std::size_t d = spec.prices.size();
  msdro::DecisionSet ds;
  ds.lower.assign(d, 0.0);
  ds.upper.assign(d, 1.0);
  ds.rows.C = {std::vector<double>(d, 1.0)};
  ds.rows.g = {static_cast<double>(spec.capacity)};

  const std::size_t total = msdro::num_multi_indices(spec.ambiguity);
  std::vector<msdro::BlockId> blocks;
  for (std::size_t a = 0; a < total; ++a) blocks.push_back({a, 0});
  const msdro::DualLp dual =
      msdro::assemble_dual_lp(spec.ambiguity, assortment_loss(spec), demand_support(d), &ds,
                              msdro::BlockForm::kConjugate, blocks);
  std::vector<std::size_t> binaries(d);
  for (std::size_t i = 0; i < d; ++i) binaries[i] = i;
  const lp::BinarySolution sol =
      lp::solve_binary_by_enumeration(dual.model, binaries, spec.capacity, options);
  if (sol.lp.status == lp::Status::kUnbounded) report_empty(spec);
  if (sol.lp.status != lp::Status::kOptimal) {
    throw NumericalFailure("assortment: no feasible support");
  }
  AssortmentResult out;
  out.selection = sol.assignment;
  out.revenue = -sol.lp.objective;
  out.supports_evaluated = sol.supports_evaluated;
  return out;
}

double assortment_revenue(const AssortmentSpec& spec, const std::vector<int>& selection) {
  spec.validate();
  std::vector<double> theta(selection.begin(), selection.end());
  return -msdro::worst_case_value(spec.ambiguity, assortment_loss(spec).at(theta),
                                  demand_support(spec.prices.size()))
              .value;
}

}  // namespace wdro::apps
