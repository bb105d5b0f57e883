#include "wdro/calibration/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "wdro/errors.hpp"
#include "wdro/transport/ot.hpp"

namespace wdro::calibration {

void ConcentrationParams::validate() const {
  if (!(p > 0.0) || !(d > 0.0) || !(A > 0.0) || !(c1 > 0.0) || !(c2 > 0.0)) {
    throw InvalidParams("concentration constants must be positive");
  }
  if (!(a > p)) throw InvalidParams("tail exponent a must exceed p");
  if (p == d / 2.0) throw InvalidParams("p = d/2 is not supported");
}

Prior Prior::dirac(double r) {
  Prior pr;
  pr.kind = Kind::kDirac;
  pr.r = r;
  return pr;
}

Prior Prior::gaussian(double mean, double sd) {
  Prior pr;
  pr.kind = Kind::kGaussian;
  pr.mean = mean;
  pr.sd = sd;
  return pr;
}

Prior Prior::table(std::vector<double> r, std::vector<double> F) {
  Prior pr;
  pr.kind = Kind::kTable;
  pr.table_r = std::move(r);
  pr.table_F = std::move(F);
  return pr;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double Prior::cdf(double x) const {
  switch (kind) {
    case Kind::kNone:
      return 0.0;
    case Kind::kDirac:
      return x >= r ? 1.0 : 0.0;
    case Kind::kGaussian: {
      if (x < 0.0) return 0.0;
      const double lo = normal_cdf(-mean / sd);
      return (normal_cdf((x - mean) / sd) - lo) / (1.0 - lo);
    }
    case Kind::kTable: {
      if (x < table_r.front()) return 0.0;
      if (x >= table_r.back()) return 1.0;
      const auto it = std::upper_bound(table_r.begin(), table_r.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - table_r.begin()) - 1;
      const double t = (x - table_r[i]) / (table_r[i + 1] - table_r[i]);
      return table_F[i] + t * (table_F[i + 1] - table_F[i]);
    }
  }
  return 0.0;
}

void Prior::validate() const {
  switch (kind) {
    case Kind::kNone:
      return;
    case Kind::kDirac:
      if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParams("Dirac prior must sit in [0, inf)");
      return;
    case Kind::kGaussian:
      if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
        throw InvalidParams("Gaussian prior needs a finite mean and positive sd");
      }
      return;
    case Kind::kTable:
      if (table_r.empty() || table_r.size() != table_F.size()) {
        throw InvalidParams("table prior needs matching nonempty knots and values");
      }
      if (table_r.front() < 0.0) throw InvalidParams("table prior knots must be nonnegative");
      for (std::size_t i = 0; i < table_r.size(); ++i) {
        if (!(table_F[i] >= 0.0 && table_F[i] <= 1.0)) {
          throw InvalidParams("table prior values must lie in [0, 1]");
        }
        if (i > 0 && (!(table_r[i] > table_r[i - 1]) || table_F[i] < table_F[i - 1])) {
          throw InvalidParams("table prior must be increasing in r and nondecreasing in F");
        }
      }
      return;
  }
}

double beta(double eps, double N, const ConcentrationParams& params) {
  params.validate();
  if (!(eps >= 0.0) || !(N >= 1.0)) throw InvalidParams("beta needs eps >= 0 and N >= 1");
  const double e = eps <= 1.0 ? std::max(params.d / params.p, 2.0) : params.a / params.p;
  const double v = params.c1 * std::exp(-params.c2 * N * std::pow(eps, e));
  return std::clamp(v, 0.0, 1.0);
}

double eps_for_beta(double b, double N, const ConcentrationParams& params) {
  params.validate();
  if (!(b > 0.0 && b <= 1.0) || !(N >= 1.0)) {
    throw InvalidParams("eps_for_beta needs beta in (0, 1] and N >= 1");
  }
  if (b >= params.c1) return 0.0;
  const double log_ratio = std::log(params.c1 / b);
  const double L = log_ratio / (params.c2 * N);
  if (N >= log_ratio / params.c2) {
    return std::pow(L, std::min(params.p / params.d, 0.5));
  }
  return std::pow(L, params.p / params.a);
}

double prior_tail_bound(double eps, double Nk, const Prior& prior,
                        const ConcentrationParams& params, const QuadratureOptions& quad) {
  prior.validate();
  if (!(eps >= 0.0)) throw InvalidParams("prior_tail_bound needs eps >= 0");
  double integral = 0.0;
  if (prior.kind == Prior::Kind::kDirac) {
    if (prior.r <= eps) integral = beta(eps - prior.r, Nk, params);
  } else if (prior.kind != Prior::Kind::kNone) {
    // Stieltjes trapezoid on a uniform grid of [0, eps], plus any atom at 0.
    const std::size_t n = std::max<std::size_t>(quad.grid_points, 2);
    const double h = eps / static_cast<double>(n - 1);
    double prev_F = prior.cdf(0.0);
    double prev_g = beta(eps, Nk, params);
    integral = prev_F * prev_g;
    for (std::size_t i = 1; i < n; ++i) {
      const double r = i + 1 == n ? eps : h * static_cast<double>(i);
      const double F = prior.cdf(r);
      const double g = beta(std::max(0.0, eps - r), Nk, params);
      integral += (F - prev_F) * 0.5 * (g + prev_g);
      prev_F = F;
      prev_g = g;
    }
  }
  return integral + 1.0 - prior.cdf(eps);
}

double bayesian_beta(double eps, double r_hat, double N1, double Nk, const Prior& prior,
                     double evidence, const ConcentrationParams& params,
                     const QuadratureOptions& quad) {
  if (!(evidence > 0.0 && evidence <= 1.0)) throw InvalidParams("evidence must lie in (0, 1]");
  if (!(r_hat >= 0.0)) throw InvalidParams("r_hat must be nonnegative");
  if (eps < r_hat) throw PreconditionViolated("bayesian_beta requires eps >= r_hat");
  const double v =
      beta(eps - r_hat, N1, params) * prior_tail_bound(eps, Nk, prior, params, quad) / evidence;
  return std::min(v, 1.0);
}

namespace {

// Smallest x in [lo, eps_max] with f(x) <= target for non-increasing f.
template <class F>
double invert_decreasing(F&& f, double target, double lo, double eps_max) {
  if (f(lo) <= target) return lo;
  double step = std::max(1.0, lo);
  double hi = lo + step;
  while (f(hi) > target) {
    if (hi >= eps_max) throw Unreachable("significance target not reachable below eps_max");
    lo = hi;
    step *= 2.0;
    hi = std::min(eps_max, hi + step);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

double eps_bayesian(double target, double r_hat, double N1, double Nk, const Prior& prior,
                    double evidence, const ConcentrationParams& params,
                    const QuadratureOptions& quad, double eps_max) {
  if (!(target > 0.0 && target <= 1.0)) throw InvalidParams("target must lie in (0, 1]");
  return invert_decreasing(
      [&](double e) { return bayesian_beta(e, r_hat, N1, Nk, prior, evidence, params, quad); },
      target, r_hat, eps_max);
}

std::vector<double> normalized_bayesian_curve(const std::vector<double>& eps, double r_hat,
                                              double N1, double Nk, const Prior& prior,
                                              const ConcentrationParams& params,
                                              const QuadratureOptions& quad) {
  const double base = bayesian_beta(r_hat, r_hat, N1, Nk, prior, 1.0, params, quad);
  std::vector<double> out;
  out.reserve(eps.size());
  for (double e : eps) {
    out.push_back(bayesian_beta(e, r_hat, N1, Nk, prior, 1.0, params, quad) / base);
  }
  return out;
}

std::vector<double> scenario_radii(const ScenarioInputs& in) {
  in.params.validate();
  const std::size_t K = in.beta.size();
  auto need = [&](std::size_t n, const char* what) {
    if (n != K) throw PreconditionViolated(std::string("scenario inputs: ") + what);
  };
  std::vector<double> eps(K);
  switch (in.scenario) {
    case 1:
      if (in.r.empty()) throw PreconditionViolated("scenario 1 needs the distances r_k");
      for (double r : in.r) {
        if (!(r >= 0.0)) throw PreconditionViolated("distances must be nonnegative");
      }
      return in.r;
    case 2:
      need(in.r.size(), "r must have one entry per source");
      need(in.N.size(), "N must have one entry per source");
      for (std::size_t k = 0; k < K; ++k) {
        eps[k] = in.r[k] + eps_for_beta(in.beta[k], in.N[k], in.params);
      }
      return eps;
    case 3: {
      need(in.empirical.size(), "one empirical distribution per source");
      if (K == 0 || in.N.empty()) throw PreconditionViolated("scenario 3 needs N_1");
      const double base = eps_for_beta(in.beta[0], in.N[0], in.params);
      for (std::size_t k = 0; k < K; ++k) {
        eps[k] = (k == 0 ? 0.0
                         : transport::wasserstein_distance(in.empirical[0], in.empirical[k],
                                                           in.norm, in.params.p)) +
                 base;
      }
      return eps;
    }
    case 4:
      need(in.N.size(), "N must have one entry per source");
      need(in.r_hat.size(), "r_hat must have one entry per source");
      need(in.priors.size(), "one prior per source");
      eps[0] = eps_for_beta(in.beta[0], in.N[0], in.params);
      for (std::size_t k = 1; k < K; ++k) {
        const double ev = in.evidence.empty() ? 1.0 : in.evidence.at(k);
        eps[k] = eps_bayesian(in.beta[k], in.r_hat[k], in.N[0], in.N[k], in.priors[k], ev,
                              in.params, in.quad);
      }
      return eps;
    case 5:
      need(in.N.size(), "N must have one entry per source");
      need(in.priors.size(), "one prior per source");
      for (std::size_t k = 0; k < K; ++k) {
        eps[k] = invert_decreasing(
            [&](double e) { return prior_tail_bound(e, in.N[k], in.priors[k], in.params, in.quad); },
            in.beta[k], 0.0, 1e6);
      }
      return eps;
    default:
      throw PreconditionViolated("scenario must be 1, 2, 3, 4 or 5");
  }
}

FitResult fit_concentration(
    const std::function<double(std::size_t, std::mt19937_64&)>& sample_distance,
    const std::vector<std::size_t>& sizes, const std::vector<double>& eps_grid,
    std::size_t trials, const ConcentrationParams& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  struct Obs {
    double x;
    double log_freq;
  };
  std::vector<Obs> obs;
  for (std::size_t N : sizes) {
    std::vector<double> dist(trials);
    for (double& v : dist) v = sample_distance(N, rng);
    for (double e : eps_grid) {
      const auto exceed = static_cast<double>(
          std::count_if(dist.begin(), dist.end(), [&](double v) { return v > e; }));
      if (exceed == 0.0) continue;
      const double ex = e <= 1.0 ? std::max(shape.d / shape.p, 2.0) : shape.a / shape.p;
      obs.push_back({static_cast<double>(N) * std::pow(e, ex),
                     std::log(exceed / static_cast<double>(trials))});
    }
  }
  FitResult out;
  out.points = obs.size();
  if (obs.size() < 2) throw InvalidParams("fit_concentration: too few exceedances to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const Obs& o : obs) {
    sx += o.x;
    sy += o.log_freq;
    sxx += o.x * o.x;
    sxy += o.x * o.log_freq;
  }
  const double n = static_cast<double>(obs.size());
  const double denom = n * sxx - sx * sx;
  double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : -1.0;
  if (!(slope < 0.0)) slope = -1e-6;
  out.c2 = -slope;
  double log_c1 = -INFINITY;
  for (const Obs& o : obs) log_c1 = std::max(log_c1, o.log_freq + out.c2 * o.x);
  out.c1 = std::exp(log_c1);
  return out;
}

}  // namespace wdro::calibration
