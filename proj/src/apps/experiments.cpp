#include "wdro/apps/experiments.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "wdro/errors.hpp"
#include "wdro/io/csv.hpp"
#include "wdro/transport/ot.hpp"

namespace wdro::apps {

using transport::DiscreteDistribution;

void ExperimentConfig::validate() const {
  if (replications == 0) throw InvalidArgument("backtest: replications must be positive");
  if (lambda_grid.empty() || m_grid.empty() || eps_grid.empty()) {
    throw InvalidArgument("backtest: hyperparameter grids must be nonempty");
  }
  for (double l : lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgument("backtest: lambda outside [0, 1]");
  }
  for (double m : m_grid) {
    if (!(m >= 0.0)) throw InvalidArgument("backtest: m must be nonnegative");
  }
  for (double e : eps_grid) {
    if (!(e >= 0.0)) throw InvalidArgument("backtest: radii must be nonnegative");
  }
  if (n_target == 0 || n_source == 0 || n_validation == 0) {
    throw InvalidArgument("backtest: sample sizes must be positive");
  }
}

const char* method_name(Method m) {
  switch (m) {
    case Method::kTarget:
      return "target";
    case Method::kSource:
      return "source";
    case Method::kPooled:
      return "pooled";
    case Method::kBarycenter:
      return "barycenter";
    case Method::kMultiSource:
      return "multi-source";
  }
  return "unknown";
}

PortfolioMetrics analytic_metrics(const std::vector<double>& weights, const FactorModel& fm) {
  double mean = 0.0, total = 0.0, squares = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    mean += weights[i] * fm.mean[i];
    total += weights[i];
    squares += weights[i] * weights[i];
  }
  const double var =
      total * total * fm.factor_sd * fm.factor_sd + squares * fm.idio_sd * fm.idio_sd;
  PortfolioMetrics out;
  out.mean = 100.0 * mean;
  out.sd = 100.0 * std::sqrt(var);
  out.sharpe = out.sd > 0.0 ? out.mean / out.sd : 0.0;
  return out;
}

double average_return(const std::vector<double>& weights, const std::vector<Point>& samples) {
  double s = 0.0;
  for (const Point& xi : samples) {
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * xi[i];
  }
  return s / static_cast<double>(samples.size());
}

namespace {

std::vector<double> single_source(const DiscreteDistribution& center, double eps,
                                  const ExperimentConfig& cfg) {
  PortfolioSpec spec;
  spec.dim = center.dim();
  spec.rho = cfg.rho;
  spec.eta = cfg.eta;
  spec.ambiguity.sources = {{center, eps}};
  return portfolio_solve(spec).weights;
}

// First candidate with the highest validation return.
std::size_t pick(const std::vector<std::vector<double>>& weights,
                 const std::vector<Point>& validation) {
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    const double v = average_return(weights[c], validation);
    if (v > best_value) {
      best_value = v;
      best = c;
    }
  }
  return best;
}

}  // namespace

Replication run_replication(const ExperimentConfig& cfg, std::size_t index) {
  const auto target = generate_synthetic(cfg.target_model, cfg.n_target,
                                         derive_seed(cfg.seed, 3 * index), cfg.generator);
  const auto source = generate_synthetic(cfg.source_model, cfg.n_source,
                                         derive_seed(cfg.seed, 3 * index + 1), cfg.generator);
  const auto validation = generate_synthetic(cfg.target_model, cfg.n_validation,
                                             derive_seed(cfg.seed, 3 * index + 2), cfg.generator);
  std::vector<Point> pooled = target;
  pooled.insert(pooled.end(), source.begin(), source.end());
  const auto P1 = DiscreteDistribution::uniform(target);
  const auto P2 = DiscreteDistribution::uniform(source);
  const auto Pp = DiscreteDistribution::uniform(pooled);
  const FactorModel truth = factor_model(cfg.target_model, cfg.generator);

  Replication rep;
  auto finish = [&](Method m, std::vector<double> w, std::vector<double> hyper) {
    MethodOutcome& o = rep.outcomes[static_cast<std::size_t>(m)];
    o.metrics = analytic_metrics(w, truth);
    o.weights = std::move(w);
    o.hyper = std::move(hyper);
  };

  std::vector<std::vector<double>> wt, ws, wp, wb;
  std::vector<double> bary_choice;
  for (double eps : cfg.eps_grid) {
    wt.push_back(single_source(P1, eps, cfg));
    ws.push_back(single_source(P2, eps, cfg));
    wp.push_back(single_source(Pp, eps, cfg));
    // Either empirical distribution is a barycenter with equal weights;
    // keep the one with the smaller validation risk.
    const double r1 = empirical_objective(wt.back(), validation, cfg.rho, cfg.eta);
    const double r2 = empirical_objective(ws.back(), validation, cfg.rho, cfg.eta);
    wb.push_back(r2 < r1 ? ws.back() : wt.back());
    bary_choice.push_back(r2 < r1 ? 1.0 : 0.0);
  }
  std::size_t c = pick(wt, validation);
  finish(Method::kTarget, wt[c], {cfg.eps_grid[c]});
  c = pick(ws, validation);
  finish(Method::kSource, ws[c], {cfg.eps_grid[c]});
  c = pick(wp, validation);
  finish(Method::kPooled, wp[c], {cfg.eps_grid[c]});
  c = pick(wb, validation);
  finish(Method::kBarycenter, wb[c], {cfg.eps_grid[c], bary_choice[c]});

  const double W = transport::wasserstein_distance(P1, P2, transport::Norm::kL1);
  std::vector<std::vector<double>> wm;
  std::vector<std::pair<double, double>> grid;
  std::vector<msdro::BlockId> blocks;
  msdro::SolveOptions opt;
  opt.blocks = &blocks;
  for (double m : cfg.m_grid) {
    for (double lambda : cfg.lambda_grid) {
      PortfolioSpec spec;
      spec.dim = P1.dim();
      spec.rho = cfg.rho;
      spec.eta = cfg.eta;
      spec.ambiguity.sources = {{P1, lambda * (1.0 + m) * W}, {P2, (1.0 - lambda) * (1.0 + m) * W}};
      wm.push_back(portfolio_solve(spec, opt).weights);
      grid.emplace_back(lambda, m);
    }
  }
  c = pick(wm, validation);
  finish(Method::kMultiSource, wm[c], {grid[c].first, grid[c].second});
  return rep;
}

BacktestReport run_backtest(const ExperimentConfig& cfg) {
  cfg.validate();
  BacktestReport report;
  report.runs.resize(cfg.replications);
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, cfg.replications));
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.replications; ++r) report.runs[r] = run_replication(cfg, r);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = t; r < cfg.replications; r += workers) {
            report.runs[r] = run_replication(cfg, r);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const double R = static_cast<double>(cfg.replications);
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    for (std::size_t k = 0; k < 3; ++k) {
      auto metric = [&](const Replication& rep) {
        const PortfolioMetrics& pm = rep.outcomes[m].metrics;
        return k == 0 ? pm.sharpe : (k == 1 ? pm.mean : pm.sd);
      };
      double s = 0.0;
      for (const auto& rep : report.runs) s += metric(rep);
      const double mean = s / R;
      double ss = 0.0;
      for (const auto& rep : report.runs) ss += (metric(rep) - mean) * (metric(rep) - mean);
      report.mean[m][k] = mean;
      report.std_error[m][k] = R > 1.0 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
    }
  }
  return report;
}

std::string BacktestReport::to_csv() const {
  static const char* kMetricNames[3] = {"sharpe_ratio", "expected_value", "standard_deviation"};
  io::CsvTable t;
  t.header = {"metric", "method", "mean", "std_error"};
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      t.rows.push_back({kMetricNames[k], method_name(kMethods[m]), io::format_number(mean[m][k]),
                        io::format_number(std_error[m][k])});
    }
  }
  return io::write_csv(t);
}

std::vector<SensitivityPoint> sensitivity_sweep(const std::vector<Point>& source1,
                                                const std::vector<Point>& source2,
                                                const std::vector<double>& lambdas,
                                                const std::vector<double>& ms, double rho,
                                                double eta) {
  const auto P1 = DiscreteDistribution::uniform(source1);
  const auto P2 = DiscreteDistribution::uniform(source2);
  const double W = transport::wasserstein_distance(P1, P2, transport::Norm::kL1);
  std::vector<SensitivityPoint> out;
  std::vector<msdro::BlockId> blocks;
  msdro::SolveOptions opt;
  opt.blocks = &blocks;
  for (double m : ms) {
    for (double lambda : lambdas) {
      if (!(lambda >= 0.0 && lambda <= 1.0) || !(m >= 0.0)) {
        throw InvalidArgument("sensitivity: need lambda in [0, 1] and m >= 0");
      }
      PortfolioSpec spec;
      spec.dim = P1.dim();
      spec.rho = rho;
      spec.eta = eta;
      spec.ambiguity.sources = {{P1, lambda * (1.0 + m) * W}, {P2, (1.0 - lambda) * (1.0 + m) * W}};
      out.push_back({lambda, m, portfolio_solve(spec, opt).weights});
    }
  }
  return out;
}

std::string sensitivity_csv(const std::vector<SensitivityPoint>& points) {
  io::CsvTable t;
  t.header = {"lambda", "m", "asset", "weight"};
  for (const auto& p : points) {
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      t.rows.push_back({io::format_number(p.lambda), io::format_number(p.m),
                        std::to_string(i + 1), io::format_number(p.weights[i])});
    }
  }
  return io::write_csv(t);
}

BiasDemoResult barycenter_bias_demo(double mu1, double mu2, double sigma, std::size_t N,
                                    std::size_t runs, std::uint64_t seed) {
  if (N == 0 || runs < 2) throw InvalidArgument("bias demo: need N >= 1 and runs >= 2");
  if (!(sigma >= 0.0)) throw InvalidArgument("bias demo: sigma must be nonnegative");
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> z(0.0, 1.0);
  BiasDemoResult out;
  out.true_variance = sigma * sigma;
  std::vector<double> x(N), y(N);
  for (std::size_t r = 0; r < runs; ++r) {
    for (std::size_t i = 0; i < N; ++i) x[i] = mu1 + sigma * z(rng);
    for (std::size_t i = 0; i < N; ++i) y[i] = mu2 + sigma * z(rng);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    double mean = 0.0;
    for (std::size_t i = 0; i < N; ++i) mean += 0.5 * (x[i] + y[i]);
    mean /= static_cast<double>(N);
    double var = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double v = 0.5 * (x[i] + y[i]) - mean;
      var += v * v;
    }
    out.variances.push_back(var / static_cast<double>(N));
  }
  const double n = static_cast<double>(runs);
  double s = 0.0;
  for (double v : out.variances) s += v;
  out.mean_variance = s / n;
  double ss = 0.0;
  for (double v : out.variances) ss += (v - out.mean_variance) * (v - out.mean_variance);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  const double gap = out.true_variance - out.mean_variance;
  if (se > 0.0) {
    out.t_statistic = gap / se;
    boost::math::students_t dist(n - 1.0);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.t_statistic));
  } else {
    out.t_statistic = gap > 0.0 ? INFINITY : 0.0;
    out.p_value = gap > 0.0 ? 0.0 : 1.0;
  }
  return out;
}

}  // namespace wdro::apps
