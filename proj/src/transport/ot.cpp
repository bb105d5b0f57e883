#include "wdro/transport/ot.hpp"

#include <cmath>

#include "wdro/errors.hpp"
#include "wdro/lp/simplex.hpp"

namespace wdro::transport {

double TransportPlan::total_mass() const {
  double s = 0.0;
  for (const Entry& e : entries) s += e.mass;
  return s;
}

std::vector<double> TransportPlan::source_marginal() const {
  std::vector<double> m(num_sources, 0.0);
  for (const Entry& e : entries) m[e.source] += e.mass;
  return m;
}

std::vector<double> TransportPlan::target_marginal() const {
  std::vector<double> m(num_targets, 0.0);
  for (const Entry& e : entries) m[e.target] += e.mass;
  return m;
}

OtResult ot_cost(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                 const GroundCost& cost) {
  if (P.dim() != Q.dim()) {
    throw DimensionMismatch("ot_cost: distributions live in different dimensions");
  }
  const std::size_t n = P.size();
  const std::size_t m = Q.size();
  std::vector<double> c(n * m);

  lp::LpBuilder builder;
  for (std::size_t i = 0; i < n; ++i) builder.add_row(lp::RowSense::kEqual, P.prob(i));
  for (std::size_t j = 0; j < m; ++j) builder.add_row(lp::RowSense::kEqual, Q.prob(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      c[i * m + j] = cost(P.atom(i), Q.atom(j));
      const auto v = builder.add_variable(0.0, lp::kInf, c[i * m + j]);
      builder.add_coefficient(i, v, 1.0);
      builder.add_coefficient(n + j, v, 1.0);
    }
  }
  const lp::LpSolution sol = lp::solve_lp(builder.build());
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalFailure("transportation LP did not reach optimality");
  }

  OtResult result;
  result.plan.num_sources = n;
  result.plan.num_targets = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double mass = sol.primal[i * m + j];
      if (mass <= 0.0) continue;
      result.plan.entries.push_back({i, j, mass});
      result.value += mass * c[i * m + j];
    }
  }
  return result;
}

double wasserstein_distance(const DiscreteDistribution& P,
                            const DiscreteDistribution& Q, Norm norm, int p) {
  if (p < 1) throw InvalidArgument("Wasserstein order must be at least 1");
  const double value = ot_cost(P, Q, GroundCost::norm_power(norm, p)).value;
  return p == 1 ? value : std::pow(value, 1.0 / p);
}

}  // namespace wdro::transport
