#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "wdro/transport/cost.hpp"
#include "wdro/transport/distribution.hpp"

namespace wdro::calibration {

// Light-tail and concentration constants. c1 and c2 have no closed form and
// must be supplied or fitted (see fit_concentration).
struct ConcentrationParams {
  double a = 2.0;  // tail exponent, > p
  double A = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double d = 1.0;
  double p = 1.0;

  // Throws InvalidParams when a <= p, p == d/2 or a constant is nonpositive.
  void validate() const;
};

// Prior CDF of the distance between the target and a reference distribution.
struct Prior {
  enum class Kind { kNone, kDirac, kGaussian, kTable };
  Kind kind = Kind::kNone;
  double r = 0.0;      // kDirac location
  double mean = 0.0;   // kGaussian, truncated to [0, inf)
  double sd = 1.0;
  std::vector<double> table_r;  // kTable knots, increasing
  std::vector<double> table_F;  // nondecreasing, in [0, 1]

  static Prior none() { return {}; }
  static Prior dirac(double r);
  static Prior gaussian(double mean, double sd);
  static Prior table(std::vector<double> r, std::vector<double> F);

  // kNone puts all mass at infinity, so cdf is identically zero. kTable is
  // zero left of the first knot, linear between knots and one past the last.
  double cdf(double x) const;
  void validate() const;
};

double beta(double eps, double N, const ConcentrationParams& params);
// Smallest radius with beta(eps, N) <= b; zero when b >= c1.
double eps_for_beta(double b, double N, const ConcentrationParams& params);

struct QuadratureOptions {
  std::size_t grid_points = 2001;
};

// Posterior significance for the radius of a reference ball after observing
// the empirical distance r_hat. Requires eps >= r_hat and evidence in (0, 1].
double bayesian_beta(double eps, double r_hat, double N1, double Nk, const Prior& prior,
                     double evidence, const ConcentrationParams& params,
                     const QuadratureOptions& quad = {});

// Prior tail bound used without target data:
//   int_0^eps beta(eps - r, Nk) dF(r) + 1 - F(eps).
double prior_tail_bound(double eps, double Nk, const Prior& prior,
                        const ConcentrationParams& params, const QuadratureOptions& quad = {});

// Smallest eps >= r_hat (to bisection accuracy) with bayesian_beta <= target.
// Throws Unreachable when no radius up to eps_max qualifies.
double eps_bayesian(double target, double r_hat, double N1, double Nk, const Prior& prior,
                    double evidence, const ConcentrationParams& params,
                    const QuadratureOptions& quad = {}, double eps_max = 1e6);

// bayesian_beta(eps) / bayesian_beta(r_hat) for each eps.
std::vector<double> normalized_bayesian_curve(const std::vector<double>& eps, double r_hat,
                                              double N1, double Nk, const Prior& prior,
                                              const ConcentrationParams& params,
                                              const QuadratureOptions& quad = {});

struct ScenarioInputs {
  int scenario = 1;
  ConcentrationParams params;
  // Scenarios 1-2: true distances r_k (r_1 = 0 for the target itself).
  std::vector<double> r;
  // Significance per source.
  std::vector<double> beta;
  std::vector<double> N;
  // Scenario 3: empirical distributions, index 0 is the target.
  std::vector<transport::DiscreteDistribution> empirical;
  transport::Norm norm = transport::Norm::kL1;
  // Scenario 4: observed distances r_hat_k, priors and evidence per source;
  // entry 0 is the target and only its N and beta are read. Scenario 5:
  // every entry is a reference source with a prior.
  std::vector<double> r_hat;
  std::vector<Prior> priors;
  std::vector<double> evidence;
  QuadratureOptions quad;
};

// Radii eps_k for the five calibration scenarios:
//  1. eps_k = r_k.
//  2. eps_k = r_k + eps(beta_k, N_k).
//  3. eps_k = W_p(P_1, P_k) + eps(beta_1, N_1) on the empirical data.
//  4. eps_1 = eps(beta_1, N_1); eps_k from eps_bayesian for k >= 2.
//  5. No target data: eps_k is the smallest radius whose prior tail bound
//     is at most beta_k.
std::vector<double> scenario_radii(const ScenarioInputs& in);

struct FitResult {
  double c1 = 1.0;
  double c2 = 1.0;
  std::size_t points = 0;
};

// Monte Carlo fit of (c1, c2) for fixed (a, d, p). sample_distance(N, rng)
// returns W_p(P, P_hat_N) for a fresh sample of size N. The exceedance
// frequency of every (N, eps) pair is regressed on N * eps^e in log scale,
// then c1 is raised until the fit dominates every observed frequency.
FitResult fit_concentration(
    const std::function<double(std::size_t, std::mt19937_64&)>& sample_distance,
    const std::vector<std::size_t>& sizes, const std::vector<double>& eps_grid,
    std::size_t trials, const ConcentrationParams& shape, std::uint64_t seed);

}  // namespace wdro::calibration
