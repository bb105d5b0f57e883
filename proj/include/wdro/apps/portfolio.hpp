#pragma once

#include <cstddef>
#include <vector>

#include "wdro/msdro/msdro.hpp"

namespace wdro::apps {

// Mean-CVaR portfolio over the unit simplex. The loss
//   max_t a_t <theta, xi> + b_t tau
// has a_1 = -1, a_2 = -1 - rho/eta, b_1 = rho, b_2 = rho (1 - 1/eta).
struct PortfolioSpec {
  std::size_t dim = 0;
  double rho = 10.0;
  double eta = 0.2;
  msdro::AmbiguitySpec ambiguity;

  void validate() const;
};

struct PortfolioResult {
  std::vector<double> weights;
  double tau = 0.0;
  double objective = 0.0;
  msdro::SolveStats stats;
};

// Decision vector (theta_1..theta_d, tau).
msdro::DecisionLoss portfolio_loss(const PortfolioSpec& spec);
msdro::DecisionSet portfolio_decisions(std::size_t dim);

PortfolioResult portfolio_solve(const PortfolioSpec& spec,
                                const msdro::SolveOptions& options = {});

// Sample-average mean-CVaR objective of fixed weights, minimized over tau.
double empirical_objective(const std::vector<double>& weights,
                           const std::vector<transport::Point>& samples, double rho,
                           double eta);

}  // namespace wdro::apps
