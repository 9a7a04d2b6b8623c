#pragma once

// Random test paths.

#include <cstdint>

#include "pathcalc/path.hpp"

namespace pathcalc {

/// Scaled random walk plus a smooth trend, clipped to [-amplitude, amplitude].
/// Brownian-rough at the grid scale.
StoppedPath random_continuous_path(const TimeGrid& grid, int dim, int stop_index,
                                   std::uint64_t seed, std::uint64_t stream, double scale = 1.0,
                                   double amplitude = 1e300);

/// Random trigonometric polynomial on [0, T]
///   a_0 + sum_{m=1}^{modes} (a_m cos(2 pi m s / T) + b_m sin(2 pi m s / T))
/// with a_m, b_m ~ scale * N(0, 1) / max(1, m)^2.
StoppedPath random_smooth_path(const TimeGrid& grid, int dim, int stop_index, std::uint64_t seed,
                               std::uint64_t stream, double scale = 1.0, int modes = 4);

}  // namespace pathcalc
