#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wdro/transport/distribution.hpp"

namespace wdro::apps {

using transport::Point;

// splitmix64 step; used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class Model {
  kSensitivitySource1,  // xi_i ~ N(i%, 1%)
  kSensitivitySource2,  // xi_i ~ N((11 - i)%, 1%)
  kBacktestModel1,      // xi_i = psi + zeta_i, r_i = +0.4% (i <= 2), -0.4% else
  kBacktestModel2,      // r_i = +0.2% (i <= 5), -0.4% else
};

// How "N(mu, s%)" is read. kStdDev: s% is the standard deviation.
// kVariance: s% is the variance.
enum class SpreadConvention { kStdDev, kVariance };

struct GeneratorOptions {
  std::size_t dim = 10;
  SpreadConvention spread = SpreadConvention::kStdDev;
};

// Per-asset means and noise levels of a synthetic model.
struct FactorModel {
  std::vector<double> mean;  // E[xi_i]
  double factor_sd = 0.0;    // sd of the common factor psi
  double idio_sd = 0.0;      // sd of each idiosyncratic term
};

FactorModel factor_model(Model model, const GeneratorOptions& opts = {});

// N return vectors; deterministic in (model, N, seed, opts).
std::vector<Point> generate_synthetic(Model model, std::size_t N, std::uint64_t seed,
                                      const GeneratorOptions& opts = {});

}  // namespace wdro::apps
