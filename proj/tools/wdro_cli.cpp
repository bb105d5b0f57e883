#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wdro/apps/assortment.hpp"
#include "wdro/apps/experiments.hpp"
#include "wdro/apps/generators.hpp"
#include "wdro/apps/portfolio.hpp"
#include "wdro/barycenter/barycenter.hpp"
#include "wdro/calibration/calibration.hpp"
#include "wdro/errors.hpp"
#include "wdro/io/csv.hpp"
#include "wdro/io/json_io.hpp"
#include "wdro/msdro/msdro.hpp"
#include "wdro/transport/ot.hpp"

namespace {

using namespace wdro;
using io::Json;

struct Common {
  std::string input;
  std::string out;
  std::uint64_t seed = 1;
  std::string eps;
  std::string lambda;
  std::string m;
  std::string grid;
};

// "a,b,c" or "lo:hi:count" (count evenly spaced points, both ends included).
std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    std::istringstream ss(text);
    double lo = 0, hi = 0;
    std::size_t count = 0;
    char c1 = 0, c2 = 0;
    ss >> lo >> c1 >> hi >> c2 >> count;
    if (!ss || c1 != ':' || c2 != ':' || count == 0) {
      throw InvalidArgument("grid must be lo:hi:count");
    }
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
    }
    return out;
  }
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: \"" + item + "\"");
    }
  }
  return out;
}

Json need_input(const Common& c) {
  if (c.input.empty()) throw InvalidArgument("--input is required");
  return io::read_json_file(c.input);
}

void emit_csv(const Common& c, const std::string& csv) {
  if (c.out.empty()) {
    std::cout << csv;
  } else {
    io::write_file(c.out, csv);
  }
}

void emit_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

void override_radii(msdro::AmbiguitySpec& amb, const Common& c) {
  const auto eps = parse_list(c.eps);
  if (eps.empty()) return;
  if (eps.size() != amb.sources.size()) {
    throw DimensionMismatch("--eps needs one radius per source");
  }
  for (std::size_t k = 0; k < eps.size(); ++k) amb.sources[k].radius = eps[k];
}

msdro::Polyhedron support_of(const Json& in) {
  return io::polyhedron_from_json(in.contains("support") ? in.at("support") : Json());
}

int cmd_ot(const Common& c) {
  const Json in = need_input(c);
  const auto P = io::distribution_from_json(in.at("P"));
  const auto Q = io::distribution_from_json(in.at("Q"));
  const auto cost = in.contains("cost") ? io::cost_from_json(in.at("cost"))
                                        : transport::GroundCost::norm_power(transport::Norm::kL1);
  const auto res = transport::ot_cost(P, Q, cost);
  io::CsvTable t;
  t.header = {"source", "target", "mass"};
  for (const auto& e : res.plan.entries) {
    t.rows.push_back({std::to_string(e.source), std::to_string(e.target),
                      io::format_number(e.mass)});
  }
  if (!c.out.empty()) emit_csv(c, io::write_csv(t));
  Json plan = Json::array();
  for (const auto& e : res.plan.entries) plan.push_back({e.source, e.target, e.mass});
  emit_json({{"value", res.value}, {"plan", plan}});
  return 0;
}

int cmd_barycenter(const Common& c) {
  const Json in = need_input(c);
  std::vector<transport::DiscreteDistribution> dists;
  for (const Json& d : in.at("distributions")) dists.push_back(io::distribution_from_json(d));
  std::vector<double> weights = in.at("weights").get<std::vector<double>>();
  const auto lam = parse_list(c.lambda);
  if (!lam.empty()) weights = lam;
  const auto cost = in.contains("cost") ? io::cost_from_json(in.at("cost"))
                                        : transport::GroundCost::sq_euclidean();
  const auto res = barycenter::barycenter(dists, weights, cost);
  io::CsvTable t;
  t.header = {"prob"};
  for (std::size_t i = 0; i < res.barycenter.dim(); ++i) {
    t.header.push_back("x" + std::to_string(i + 1));
  }
  for (std::size_t j = 0; j < res.barycenter.size(); ++j) {
    std::vector<std::string> row{io::format_number(res.barycenter.prob(j))};
    for (double v : res.barycenter.atom(j)) row.push_back(io::format_number(v));
    t.rows.push_back(std::move(row));
  }
  if (!c.out.empty()) emit_csv(c, io::write_csv(t));
  emit_json({{"objective", res.objective}, {"barycenter", io::to_json(res.barycenter)}});
  return 0;
}

int cmd_dro_value(const Common& c) {
  const Json in = need_input(c);
  auto amb = io::ambiguity_from_json(in.at("ambiguity"));
  override_radii(amb, c);
  const auto loss = io::loss_from_json(in.at("loss"));
  const auto sol = msdro::worst_case_value(amb, loss, support_of(in));
  emit_json(io::to_json(sol));
  return 0;
}

int cmd_dro_worstcase(const Common& c) {
  const Json in = need_input(c);
  auto amb = io::ambiguity_from_json(in.at("ambiguity"));
  override_radii(amb, c);
  const auto loss = io::loss_from_json(in.at("loss"));
  const auto wc = msdro::worst_case_distribution(amb, loss, support_of(in));
  io::CsvTable t;
  t.header = {"prob"};
  for (std::size_t i = 0; i < amb.dim(); ++i) t.header.push_back("x" + std::to_string(i + 1));
  for (std::size_t j = 0; j < wc.distribution.size(); ++j) {
    std::vector<std::string> row{io::format_number(wc.distribution.prob(j))};
    for (double v : wc.distribution.atom(j)) row.push_back(io::format_number(v));
    t.rows.push_back(std::move(row));
  }
  if (!c.out.empty()) emit_csv(c, io::write_csv(t));
  emit_json({{"distribution", io::to_json(wc.distribution)},
             {"support_bound", wc.support_bound},
             {"budgets_used", wc.budgets_used},
             {"expected_loss", wc.distribution.expect([&](const auto& x) { return loss(x); })}});
  return 0;
}

int cmd_dro_solve(const Common& c) {
  const Json in = need_input(c);
  auto amb = io::ambiguity_from_json(in.at("ambiguity"));
  override_radii(amb, c);
  const auto loss = io::decision_loss_from_json(in.at("decision_loss"));
  const auto ds = io::decision_set_from_json(in.contains("decisions") ? in.at("decisions") : Json());
  const auto sol = msdro::solve_msdro(amb, loss, ds, support_of(in));
  emit_json({{"theta", sol.theta}, {"value", sol.value}, {"dual", io::to_json(sol.dual)}});
  return 0;
}

int cmd_calibrate(const Common& c) {
  const Json in = need_input(c);
  const auto params = io::params_from_json(in.at("params"));
  if (in.contains("curve")) {
    const Json& cv = in.at("curve");
    const double r_hat = cv.at("r_hat").get<double>();
    auto eps = parse_list(c.grid.empty() ? c.eps : c.grid);
    if (eps.empty()) throw InvalidArgument("calibrate curve needs --grid");
    const auto prior = io::prior_from_json(cv.at("prior"));
    const double evidence = cv.value("evidence", 1.0);
    io::CsvTable t;
    t.header = {"eps", "beta"};
    for (double e : eps) {
      const double b = calibration::bayesian_beta(e, r_hat, cv.at("N1").get<double>(),
                                                  cv.at("Nk").get<double>(), prior, evidence,
                                                  params);
      t.rows.push_back({io::format_number(e), io::format_number(b)});
    }
    emit_csv(c, io::write_csv(t));
    return 0;
  }
  calibration::ScenarioInputs s;
  s.scenario = in.at("scenario").get<int>();
  s.params = params;
  s.r = in.value("r", std::vector<double>{});
  s.beta = in.value("beta", std::vector<double>{});
  s.N = in.value("N", std::vector<double>{});
  if (in.contains("empirical")) {
    for (const Json& d : in.at("empirical")) s.empirical.push_back(io::distribution_from_json(d));
  }
  if (in.contains("norm")) s.norm = io::cost_from_json(Json{{"norm", in.at("norm")}}).norm;
  s.r_hat = in.value("r_hat", std::vector<double>{});
  if (in.contains("priors")) {
    for (const Json& p : in.at("priors")) s.priors.push_back(io::prior_from_json(p));
  }
  s.evidence = in.value("evidence", std::vector<double>{});
  emit_json({{"radii", calibration::scenario_radii(s)}});
  return 0;
}

int cmd_portfolio(const Common& c, std::size_t n) {
  apps::PortfolioSpec spec;
  if (!c.input.empty()) {
    const Json in = need_input(c);
    spec.ambiguity = io::ambiguity_from_json(in.at("ambiguity"));
    spec.rho = in.value("rho", spec.rho);
    spec.eta = in.value("eta", spec.eta);
    override_radii(spec.ambiguity, c);
  } else {
    // Two-source synthetic instance of the sensitivity study.
    const auto lam = parse_list(c.lambda.empty() ? "0.5" : c.lambda);
    const auto m = parse_list(c.m.empty() ? "0.01" : c.m);
    const auto s1 = apps::generate_synthetic(apps::Model::kSensitivitySource1, n,
                                             apps::derive_seed(c.seed, 0));
    const auto s2 = apps::generate_synthetic(apps::Model::kSensitivitySource2, n,
                                             apps::derive_seed(c.seed, 1));
    const auto P1 = transport::DiscreteDistribution::uniform(s1);
    const auto P2 = transport::DiscreteDistribution::uniform(s2);
    const double W = transport::wasserstein_distance(P1, P2, transport::Norm::kL1);
    spec.ambiguity.sources = {{P1, lam.at(0) * (1 + m.at(0)) * W},
                              {P2, (1 - lam.at(0)) * (1 + m.at(0)) * W}};
  }
  spec.dim = spec.ambiguity.dim();
  const auto res = apps::portfolio_solve(spec);
  emit_json({{"weights", res.weights}, {"tau", res.tau}, {"objective", res.objective}});
  return 0;
}

int cmd_assortment(const Common& c) {
  const Json in = need_input(c);
  apps::AssortmentSpec spec;
  spec.prices = in.at("prices").get<std::vector<double>>();
  spec.capacity = in.at("capacity").get<std::size_t>();
  spec.ambiguity = io::ambiguity_from_json(in.at("ambiguity"));
  override_radii(spec.ambiguity, c);
  const auto res = apps::assortment_solve(spec);
  emit_json({{"selection", res.selection},
             {"revenue", res.revenue},
             {"supports_evaluated", res.supports_evaluated}});
  return 0;
}

int cmd_backtest(const Common& c, std::size_t reps, std::size_t threads, bool variance) {
  apps::ExperimentConfig cfg;
  cfg.seed = c.seed;
  cfg.replications = reps;
  cfg.threads = threads;
  if (variance) cfg.generator.spread = apps::SpreadConvention::kVariance;
  if (!c.lambda.empty()) cfg.lambda_grid = parse_list(c.lambda);
  if (!c.m.empty()) cfg.m_grid = parse_list(c.m);
  if (!c.eps.empty()) cfg.eps_grid = parse_list(c.eps);
  if (!c.grid.empty()) cfg.eps_grid = parse_list(c.grid);
  emit_csv(c, apps::run_backtest(cfg).to_csv());
  return 0;
}

int cmd_bias(const Common& c, double mu1, double mu2, double sigma, std::size_t n,
             std::size_t runs) {
  const auto r = apps::barycenter_bias_demo(mu1, mu2, sigma, n, runs, c.seed);
  if (!c.out.empty()) {
    io::CsvTable t;
    t.header = {"run", "variance"};
    for (std::size_t i = 0; i < r.variances.size(); ++i) {
      t.rows.push_back({std::to_string(i), io::format_number(r.variances[i])});
    }
    emit_csv(c, io::write_csv(t));
  }
  emit_json({{"mean_variance", r.mean_variance},
             {"true_variance", r.true_variance},
             {"t_statistic", r.t_statistic},
             {"p_value", r.p_value}});
  return 0;
}

int cmd_sensitivity(const Common& c, std::size_t n) {
  const auto lambdas = parse_list(c.lambda.empty() ? "0:1:11" : c.lambda);
  const auto ms = parse_list(c.m.empty() ? "0.01" : c.m);
  const auto s1 = apps::generate_synthetic(apps::Model::kSensitivitySource1, n,
                                           apps::derive_seed(c.seed, 0));
  const auto s2 = apps::generate_synthetic(apps::Model::kSensitivitySource2, n,
                                           apps::derive_seed(c.seed, 1));
  emit_csv(c, apps::sensitivity_csv(apps::sensitivity_sweep(s1, s2, lambdas, ms)));
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--input", c.input, "JSON input file");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--out", c.out, "CSV output path");
  sub->add_option("--eps", c.eps, "radii, comma separated");
  sub->add_option("--lambda", c.lambda, "lambda values (list or lo:hi:count)");
  sub->add_option("--m", c.m, "m values (list or lo:hi:count)");
  sub->add_option("--grid", c.grid, "evaluation grid (list or lo:hi:count)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source Wasserstein distributionally robust optimization"};
  app.require_subcommand(1);
  Common c;
  std::size_t n = 30, reps = 10, threads = 1, runs = 200;
  double mu1 = 0.0, mu2 = 1.0, sigma = 1.0;
  bool variance = false;

  const std::vector<std::pair<const char*, const char*>> names{
      {"ot", "optimal transport cost and plan"},
      {"barycenter", "multi-marginal Wasserstein barycenter"},
      {"dro-value", "worst-case expected loss over intersecting balls"},
      {"dro-worstcase", "discrete worst-case distribution"},
      {"dro-solve", "min over decisions of the worst-case loss"},
      {"calibrate", "radii for the calibration scenarios, or a beta curve"},
      {"portfolio", "mean-CVaR portfolio"},
      {"assortment", "worst-case optimal assortment"},
      {"backtest", "synthetic portfolio backtest"},
      {"bias-demo", "variance of empirical barycenters"},
      {"sensitivity", "portfolio weights over (lambda, m)"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, c);
    subs.push_back(sub);
  }
  app.get_subcommand("portfolio")->add_option("--n", n, "samples per source (synthetic)");
  app.get_subcommand("sensitivity")->add_option("--n", n, "samples per source");
  app.get_subcommand("backtest")->add_option("--reps", reps, "replications");
  app.get_subcommand("backtest")->add_option("--threads", threads, "worker threads");
  app.get_subcommand("backtest")->add_flag("--variance", variance,
                                           "read N(mu, s%) spreads as variances");
  CLI::App* bias = app.get_subcommand("bias-demo");
  bias->add_option("--n", n, "samples per distribution");
  bias->add_option("--runs", runs, "independent draws");
  bias->add_option("--mu1", mu1);
  bias->add_option("--mu2", mu2);
  bias->add_option("--sigma", sigma);

  CLI11_PARSE(app, argc, argv);
  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "ot") return cmd_ot(c);
    if (cmd == "barycenter") return cmd_barycenter(c);
    if (cmd == "dro-value") return cmd_dro_value(c);
    if (cmd == "dro-worstcase") return cmd_dro_worstcase(c);
    if (cmd == "dro-solve") return cmd_dro_solve(c);
    if (cmd == "calibrate") return cmd_calibrate(c);
    if (cmd == "portfolio") return cmd_portfolio(c, n);
    if (cmd == "assortment") return cmd_assortment(c);
    if (cmd == "backtest") return cmd_backtest(c, reps, threads, variance);
    if (cmd == "bias-demo") return cmd_bias(c, mu1, mu2, sigma, n, runs);
    if (cmd == "sensitivity") return cmd_sensitivity(c, n);
  } catch (const msdro::IntersectionEmpty& e) {
    const auto& cert = e.certificate();
    emit_json({{"error", "IntersectionEmpty"},
               {"message", e.what()},
               {"certificate",
                {{"lambda_inf", cert.lambda_inf},
                 {"gamma_inf", cert.gamma_inf},
                 {"slope", cert.slope},
                 {"base", io::to_json(cert.base)}}}});
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
