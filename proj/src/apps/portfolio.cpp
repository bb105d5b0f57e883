#include "wdro/apps/portfolio.hpp"

#include <algorithm>
#include <cmath>

namespace wdro::apps {

void PortfolioSpec::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("portfolio: eta must lie in (0, 1]");
  if (!(rho >= 0.0)) throw InvalidArgument("portfolio: rho must be nonnegative");
  if (dim == 0 || ambiguity.dim() != dim) {
    throw DimensionMismatch("portfolio: ambiguity dimension differs from dim");
  }
}

msdro::DecisionLoss portfolio_loss(const PortfolioSpec& spec) {
  const std::size_t d = spec.dim;
  const double a[2] = {-1.0, -1.0 - spec.rho / spec.eta};
  const double b[2] = {spec.rho, spec.rho * (1.0 - 1.0 / spec.eta)};
  msdro::DecisionLoss loss;
  loss.num_decisions = d + 1;
  for (int t = 0; t < 2; ++t) {
    msdro::DecisionPiece piece;
    piece.A.assign(d, std::vector<double>(d + 1, 0.0));
    for (std::size_t i = 0; i < d; ++i) piece.A[i][i] = a[t];
    piece.a0.assign(d, 0.0);
    piece.c.assign(d + 1, 0.0);
    piece.c[d] = b[t];
    loss.pieces.push_back(std::move(piece));
  }
  return loss;
}

msdro::DecisionSet portfolio_decisions(std::size_t dim) {
  msdro::DecisionSet ds;
  std::vector<double> ones(dim + 1, 1.0), minus(dim + 1, -1.0);
  ones[dim] = 0.0;
  minus[dim] = 0.0;
  ds.rows.C = {ones, minus};
  ds.rows.g = {1.0, -1.0};
  ds.lower.assign(dim + 1, 0.0);
  ds.lower[dim] = -lp::kInf;
  ds.upper.assign(dim + 1, lp::kInf);
  return ds;
}

PortfolioResult portfolio_solve(const PortfolioSpec& spec, const msdro::SolveOptions& options) {
  spec.validate();
  const auto sol = msdro::solve_msdro(spec.ambiguity, portfolio_loss(spec),
                                      portfolio_decisions(spec.dim),
                                      msdro::Polyhedron::whole_space(), options);
  PortfolioResult out;
  out.weights.assign(sol.theta.begin(), sol.theta.begin() + static_cast<long>(spec.dim));
  for (double& w : out.weights) w = std::max(0.0, w);
  double total = 0.0;
  for (double w : out.weights) total += w;
  for (double& w : out.weights) w /= total;
  out.tau = sol.theta[spec.dim];
  out.objective = sol.value;
  out.stats = sol.stats;
  return out;
}

double empirical_objective(const std::vector<double>& weights,
                           const std::vector<transport::Point>& samples, double rho,
                           double eta) {
  // The objective is convex piecewise linear in tau with breakpoints at the
  // sample losses, so the minimum sits at one of them.
  std::vector<double> loss(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    double r = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) r += weights[i] * samples[s][i];
    loss[s] = -r;
  }
  double best = INFINITY;
  for (double tau : loss) {
    double v = 0.0;
    for (double l : loss) v += l + rho * (tau + std::max(0.0, l - tau) / eta);
    best = std::min(best, v / static_cast<double>(loss.size()));
  }
  return best;
}

}  // namespace wdro::apps
