#pragma once

#include <array>
#include <cstdint>

namespace pathcalc {

/// Philox4x32-10 block function.  Counter-based: the output depends only on
/// (key, counter), so any stream position can be generated independently.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Reproducible Gaussian draws addressed by (stream, index).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Standard normal number `index` of stream `stream`.
  double normal(std::uint64_t stream, std::uint64_t index) const;
  /// Uniform number in (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

}  // namespace pathcalc
