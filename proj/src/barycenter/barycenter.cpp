#include "wdro/barycenter/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wdro/errors.hpp"
#include "wdro/lp/simplex.hpp"
#include "wdro/transport/ot.hpp"

namespace wdro::barycenter {

namespace {

void check_weights(const std::vector<double>& weights) {
  bool any = false;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("barycenter weights must be finite and nonnegative");
    }
    any = any || w > 0.0;
  }
  if (!any) throw AllWeightsZero("all barycenter weights are zero");
}

bool supported(const GroundCost& cost) {
  return cost.kind == GroundCost::Kind::kSqEuclidean ||
         (cost.norm == transport::Norm::kL1 && cost.p == 1);
}

}  // namespace

InnerMinimizer inner_minimizer(const std::vector<Point>& points,
                               const std::vector<double>& weights,
                               const GroundCost& cost) {
  if (points.size() != weights.size() || points.empty()) {
    throw DimensionMismatch("inner_minimizer: points and weights differ in length");
  }
  check_weights(weights);
  if (!supported(cost)) {
    throw UnsupportedCost("inner minimizer supports squared Euclidean and L1 costs");
  }
  const std::size_t d = points[0].size();
  for (const Point& p : points) {
    if (p.size() != d) throw DimensionMismatch("inner_minimizer: unequal dimensions");
  }

  InnerMinimizer out;
  out.Phi.assign(d, 0.0);
  if (cost.kind == GroundCost::Kind::kSqEuclidean) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t k = 0; k < points.size(); ++k) {
      for (std::size_t i = 0; i < d; ++i) out.Phi[i] += weights[k] * points[k][i];
    }
    for (double& v : out.Phi) v /= total;
  } else {
    std::vector<std::pair<double, double>> column;
    for (std::size_t i = 0; i < d; ++i) {
      column.clear();
      double total = 0.0;
      for (std::size_t k = 0; k < points.size(); ++k) {
        if (weights[k] == 0.0) continue;
        column.emplace_back(points[k][i], weights[k]);
        total += weights[k];
      }
      std::sort(column.begin(), column.end());
      double cumulative = 0.0;
      for (const auto& [value, w] : column) {
        cumulative += w;
        if (cumulative >= 0.5 * total * (1.0 - 1e-12)) {
          out.Phi[i] = value;
          break;
        }
      }
    }
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (weights[k] != 0.0) out.phi += weights[k] * cost(out.Phi, points[k]);
  }
  return out;
}

BarycenterResult barycenter(const std::vector<DiscreteDistribution>& distributions,
                            const std::vector<double>& weights,
                            const GroundCost& cost,
                            const BarycenterOptions& options) {
  const std::size_t K = distributions.size();
  if (K == 0 || weights.size() != K) {
    throw DimensionMismatch("barycenter: need one weight per distribution");
  }
  check_weights(weights);
  if (!supported(cost)) {
    throw UnsupportedCost("barycenter supports squared Euclidean and L1 costs");
  }
  const std::size_t d = distributions[0].dim();
  std::size_t count = 1;
  for (const auto& P : distributions) {
    if (P.dim() != d) throw DimensionMismatch("barycenter: unequal dimensions");
    if (count > options.max_multi_indices / P.size() + 1) {
      count = options.max_multi_indices + 1;
    } else {
      count *= P.size();
    }
  }
  if (count > options.max_multi_indices) {
    throw SizeExceeded("barycenter: multi-index set exceeds " +
                       std::to_string(options.max_multi_indices));
  }

  // Rows: one marginal constraint per (k, j).
  std::vector<std::size_t> row_offset(K, 0);
  lp::LpBuilder builder;
  for (std::size_t k = 0; k < K; ++k) {
    row_offset[k] = builder.num_rows();
    for (std::size_t j = 0; j < distributions[k].size(); ++j) {
      builder.add_row(lp::RowSense::kEqual, distributions[k].prob(j));
    }
  }

  std::vector<std::vector<std::size_t>> alphas;
  std::vector<InnerMinimizer> inner;
  alphas.reserve(count);
  inner.reserve(count);
  std::vector<std::size_t> alpha(K, 0);
  std::vector<Point> points(K);
  for (std::size_t idx = 0; idx < count; ++idx) {
    for (std::size_t k = 0; k < K; ++k) points[k] = distributions[k].atom(alpha[k]);
    inner.push_back(inner_minimizer(points, weights, cost));
    const auto v = builder.add_variable(0.0, lp::kInf, inner.back().phi);
    for (std::size_t k = 0; k < K; ++k) {
      builder.add_coefficient(row_offset[k] + alpha[k], v, 1.0);
    }
    alphas.push_back(alpha);
    for (std::size_t k = K; k-- > 0;) {
      if (++alpha[k] < distributions[k].size()) break;
      alpha[k] = 0;
    }
  }

  lp::SolverOptions lp_options;
  lp_options.max_cols = std::max(lp_options.max_cols, count);
  const lp::LpSolution sol = lp::solve_lp(builder.build(), lp_options);
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalFailure("multi-marginal LP did not reach optimality");
  }

  BarycenterResult result;
  std::vector<Point> atoms;
  std::vector<double> masses;
  double total = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    const double mass = sol.primal[idx];
    if (mass <= 1e-14) continue;
    result.plan.entries.push_back({alphas[idx], mass});
    result.objective += mass * inner[idx].phi;
    total += mass;
    const Point& x = inner[idx].Phi;
    auto same = [&](const Point& y) {
      for (std::size_t i = 0; i < d; ++i) {
        if (std::abs(x[i] - y[i]) > options.merge_tol) return false;
      }
      return true;
    };
    const auto it = std::find_if(atoms.begin(), atoms.end(), same);
    if (it == atoms.end()) {
      atoms.push_back(x);
      masses.push_back(mass);
    } else {
      masses[static_cast<std::size_t>(it - atoms.begin())] += mass;
    }
  }
  for (double& m : masses) m /= total;
  result.barycenter = DiscreteDistribution(std::move(atoms), std::move(masses));
  return result;
}

double barycenter_objective(const DiscreteDistribution& candidate,
                            const std::vector<DiscreteDistribution>& distributions,
                            const std::vector<double>& weights,
                            const GroundCost& cost) {
  if (weights.size() != distributions.size()) {
    throw DimensionMismatch("barycenter_objective: one weight per distribution");
  }
  double value = 0.0;
  for (std::size_t k = 0; k < distributions.size(); ++k) {
    if (weights[k] == 0.0) continue;
    value += weights[k] * transport::ot_cost(candidate, distributions[k], cost).value;
  }
  return value;
}

}  // namespace wdro::barycenter
