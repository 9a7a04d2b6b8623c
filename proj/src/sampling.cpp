#include "pathcalc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pathcalc/errors.hpp"
#include "pathcalc/rng.hpp"

namespace pathcalc {

StoppedPath random_continuous_path(const TimeGrid& grid, int dim, int stop_index,
                                   std::uint64_t seed, std::uint64_t stream, double scale,
                                   double amplitude) {
  const CounterRng rng(seed);
  const int nodes = grid.node_count();
  const double sq = std::sqrt(grid.dt());
  std::vector<double> values(static_cast<std::size_t>(nodes) * dim);
  std::uint64_t draw = 0;
  for (int j = 0; j < dim; ++j) {
    const double start = scale * rng.normal(stream, draw++);
    const double wave = scale * (2.0 * rng.uniform(stream, draw++) - 1.0);
    const double freq = 0.5 + 2.0 * rng.uniform(stream, draw++);
    double walk = 0.0;
    for (int i = 0; i < nodes; ++i) {
      if (i > 0) walk += scale * sq * rng.normal(stream, draw++);
      const double t = grid.time(i);
      const double v = start + walk + wave * std::sin(2.0 * std::numbers::pi * freq * t);
      values[static_cast<std::size_t>(i) * dim + j] = std::clamp(v, -amplitude, amplitude);
    }
  }
  return StoppedPath::from_samples(grid, dim, std::move(values), stop_index);
}

StoppedPath random_smooth_path(const TimeGrid& grid, int dim, int stop_index, std::uint64_t seed,
                               std::uint64_t stream, double scale, int modes) {
  if (modes < 0) throw DomainError("random_smooth_path: modes must be >= 0");
  const CounterRng rng(seed);
  const double omega = 2.0 * std::numbers::pi / grid.horizon();
  std::vector<double> values(static_cast<std::size_t>(grid.node_count()) * dim);
  std::uint64_t draw = 0;
  for (int j = 0; j < dim; ++j) {
    std::vector<double> a(modes + 1), b(modes + 1);
    for (int m = 0; m <= modes; ++m) {
      const double decay = scale / std::pow(std::max(1, m), 2);
      a[m] = decay * rng.normal(stream, draw++);
      b[m] = decay * rng.normal(stream, draw++);
    }
    for (int i = 0; i < grid.node_count(); ++i) {
      const double s = grid.time(i);
      double v = a[0];
      for (int m = 1; m <= modes; ++m) v += a[m] * std::cos(omega * m * s) + b[m] * std::sin(omega * m * s);
      values[static_cast<std::size_t>(i) * dim + j] = v;
    }
  }
  return StoppedPath::from_samples(grid, dim, std::move(values), stop_index);
}

}  // namespace pathcalc
