#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wdro/apps/generators.hpp"
#include "wdro/apps/portfolio.hpp"

namespace wdro::apps {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t replications = 10;
  std::vector<double> lambda_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> m_grid{0.002, 0.005, 0.01, 0.02};
  std::vector<double> eps_grid{0.005, 0.01, 0.05, 0.1, 0.2, 0.5, 1,   2,
                               5,     10,   20,   50,  100, 200, 500};
  std::size_t n_target = 5;
  std::size_t n_source = 30;
  std::size_t n_validation = 5;
  Model target_model = Model::kBacktestModel1;
  Model source_model = Model::kBacktestModel2;
  GeneratorOptions generator;
  double rho = 10.0;
  double eta = 0.2;
  // Worker threads over replications; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
};

enum class Method { kTarget, kSource, kPooled, kBarycenter, kMultiSource };
inline constexpr std::array<Method, 5> kMethods{Method::kTarget, Method::kSource,
                                                Method::kPooled, Method::kBarycenter,
                                                Method::kMultiSource};
const char* method_name(Method m);

// Exact moments of the portfolio return under a factor model, in percent.
struct PortfolioMetrics {
  double mean = 0.0;
  double sd = 0.0;
  double sharpe = 0.0;
};
PortfolioMetrics analytic_metrics(const std::vector<double>& weights, const FactorModel& fm);

struct MethodOutcome {
  std::vector<double> weights;
  PortfolioMetrics metrics;
  // Selected hyperparameters: eps for single-source methods, (lambda, m)
  // for the multi-source method; candidate index 0/1 for the barycenter.
  std::vector<double> hyper;
};

struct Replication {
  std::array<MethodOutcome, kMethods.size()> outcomes;
};

struct BacktestReport {
  std::vector<Replication> runs;
  // [method][metric] with metrics ordered (sharpe, mean, sd).
  std::array<std::array<double, 3>, kMethods.size()> mean{};
  std::array<std::array<double, 3>, kMethods.size()> std_error{};

  // Long-format table: metric, method, mean, std_error.
  std::string to_csv() const;
};

Replication run_replication(const ExperimentConfig& config, std::size_t index);
BacktestReport run_backtest(const ExperimentConfig& config);

// Average of <weights, xi> over the samples.
double average_return(const std::vector<double>& weights, const std::vector<Point>& samples);

struct SensitivityPoint {
  double lambda = 0.0;
  double m = 0.0;
  std::vector<double> weights;
};

// Two-source portfolio for every (lambda, m) pair with
// eps_1 = lambda (1 + m) W, eps_2 = (1 - lambda) (1 + m) W.
std::vector<SensitivityPoint> sensitivity_sweep(const std::vector<Point>& source1,
                                                const std::vector<Point>& source2,
                                                const std::vector<double>& lambdas,
                                                const std::vector<double>& ms,
                                                double rho = 10.0, double eta = 0.2);
std::string sensitivity_csv(const std::vector<SensitivityPoint>& points);

struct BiasDemoResult {
  double mean_variance = 0.0;  // average variance of the empirical barycenter
  double true_variance = 0.0;  // sigma^2
  double t_statistic = 0.0;    // one-sided, H1: mean_variance < sigma^2
  double p_value = 1.0;
  std::vector<double> variances;
};

// Two 1-D Gaussians N(mu_k, sigma^2), N samples each, equal weights,
// squared Euclidean cost; the empirical barycenter of two equal-size
// uniform samples averages the order statistics.
BiasDemoResult barycenter_bias_demo(double mu1, double mu2, double sigma, std::size_t N,
                                    std::size_t runs, std::uint64_t seed);

}  // namespace wdro::apps
