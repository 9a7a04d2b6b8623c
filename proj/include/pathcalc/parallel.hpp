#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace pathcalc {

/// Worker cap from PATHCALC_THREADS, defaulting to the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads (0 = worker_count()).
/// Indices are split into contiguous blocks; callers write results by index
/// so the outcome does not depend on the split.  The first exception thrown
/// by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error (sample std with n-1, over sqrt(n)), both
/// reduced with pairwise summation.
SampleStats sample_stats(std::span<const double> values);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace pathcalc
