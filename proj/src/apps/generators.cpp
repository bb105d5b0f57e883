#include "wdro/apps/generators.hpp"

#include <cmath>
#include <random>

#include "wdro/errors.hpp"

namespace wdro::apps {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

FactorModel factor_model(Model model, const GeneratorOptions& opts) {
  const std::size_t d = opts.dim;
  auto spread = [&](double percent) {
    return opts.spread == SpreadConvention::kStdDev ? percent / 100.0
                                                    : std::sqrt(percent / 100.0);
  };
  FactorModel fm;
  fm.mean.resize(d);
  switch (model) {
    case Model::kSensitivitySource1:
      for (std::size_t i = 0; i < d; ++i) fm.mean[i] = static_cast<double>(i + 1) / 100.0;
      fm.idio_sd = spread(1.0);
      break;
    case Model::kSensitivitySource2:
      for (std::size_t i = 0; i < d; ++i) {
        fm.mean[i] = static_cast<double>(d + 1 - (i + 1)) / 100.0;
      }
      fm.idio_sd = spread(1.0);
      break;
    case Model::kBacktestModel1:
      for (std::size_t i = 0; i < d; ++i) fm.mean[i] = i < 2 ? 0.004 : -0.004;
      fm.factor_sd = spread(2.0);
      fm.idio_sd = spread(1.0);
      break;
    case Model::kBacktestModel2:
      for (std::size_t i = 0; i < d; ++i) fm.mean[i] = i < 5 ? 0.002 : -0.004;
      fm.factor_sd = spread(2.0);
      fm.idio_sd = spread(1.0);
      break;
  }
  return fm;
}

std::vector<Point> generate_synthetic(Model model, std::size_t N, std::uint64_t seed,
                                      const GeneratorOptions& opts) {
  if (N == 0) throw InvalidArgument("generate_synthetic: N must be positive");
  const FactorModel fm = factor_model(model, opts);
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Point> out(N, Point(opts.dim));
  for (auto& xi : out) {
    const double psi = fm.factor_sd * z(rng);
    for (std::size_t i = 0; i < opts.dim; ++i) xi[i] = fm.mean[i] + psi + fm.idio_sd * z(rng);
  }
  return out;
}

}  // namespace wdro::apps
