#pragma once

// Euler-Maruyama for path-dependent SDEs
//   dX(s) = b(s, X) ds + sigma(s, X) dW(s),  X = gamma on [0, t],
// with non-anticipative coefficients, plus Monte Carlo helpers.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathcalc/functional.hpp"
#include "pathcalc/parallel.hpp"
#include "pathcalc/sampling.hpp"

namespace pathcalc {

struct SfdeModel {
  using Drift = std::function<Eigen::VectorXd(double, const StoppedPath&)>;
  using Diffusion = std::function<Eigen::MatrixXd(double, const StoppedPath&)>;

  std::string name;
  int state_dim = 1;
  int noise_dim = 1;
  Drift drift;
  Diffusion diffusion;
  double lipschitz_c = 1.0;
  double bound_K = 1.0;
};

/// Built-in scalar models: zero, drift1, bm, linear-pd, tanh-pd.
/// `clip` is the clipping radius used by linear-pd.
SfdeModel make_model(const std::string& id, double clip = 10.0);
std::vector<std::string> model_ids();

/// Brownian increments for an ensemble.  Draws are generated on a grid of
/// `fine_steps` steps (0 means "the simulation grid") and summed onto the
/// simulation grid, so resolutions dividing fine_steps share one Brownian
/// path.  Path j only uses the stream (seed, j).
struct NoisePlan {
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;
  int fine_steps = 0;

  /// Rows of `noise_dim` increments for steps [from, to) of `grid`.
  std::vector<double> increments(std::size_t path, const TimeGrid& grid, int noise_dim, int from,
                                 int to) const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

/// One Euler-Maruyama path from the initial stopped path up to `until`.
/// `noise` holds (index(until) - stop_index) rows of noise_dim increments.
/// Coefficients at node i see the path stopped at t_i.
StoppedPath euler_solve(const SfdeModel& model, const StoppedPath& initial, double until,
                        std::span<const double> noise);

/// Paths in index order, independent of the worker count.
std::vector<StoppedPath> simulate_ensemble(const SfdeModel& model, const StoppedPath& initial,
                                           double until, const NoisePlan& plan, int workers = 0);

McEstimate mc_expectation(const Functional& f, const SfdeModel& model, const StoppedPath& initial,
                          double at, const NoisePlan& plan, int workers = 0);

/// Where the assumption checkers draw their random paths.
struct SamplingDomain {
  TimeGrid grid{1.0, 64};
  double amplitude = 10.0;
};

struct AssumptionReport {
  double max_observed = 0.0;
  double declared = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

/// Largest observed (|b1 - b2| + |sigma1 - sigma2|) / ||x1_s - x2_s|| on random
/// path pairs; passes iff it stays within lipschitz_c (1 + 1e-9).
AssumptionReport check_lipschitz(const SfdeModel& model, std::size_t samples, std::uint64_t seed,
                                 const SamplingDomain& domain = {});

/// Largest observed |b| + |sigma| on random paths against bound_K.
AssumptionReport check_bounded(const SfdeModel& model, std::size_t samples, std::uint64_t seed,
                               const SamplingDomain& domain = {});

}  // namespace pathcalc
