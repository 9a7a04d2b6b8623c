#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pathcalc/functional.hpp"

namespace pathcalc {

/// Default directional step 1e-4 / (1 + ||eta||).
double default_directional_step(const StoppedPath& eta);

/// Central difference (f(p + h eta) - f(p - h eta)) / 2h.  The perturbed
/// path is p + h eta on [0, t] and frozen afterwards.
double directional_derivative(const Functional& f, const StoppedPath& p, const StoppedPath& eta,
                              std::optional<double> h = std::nullopt);

/// Four-point mixed difference along (eta1, eta2).
double second_directional_derivative(const Functional& f, const StoppedPath& p,
                                     const StoppedPath& eta1, const StoppedPath& eta2,
                                     std::optional<double> h = std::nullopt);

/// Ramps xi_k(s) = (k (s - t) + 1) upsilon on [t - 1/k, t], zero before.
/// Every 1/k must be a multiple of dt and t - 1/k >= 0.
struct RampFamily {
  std::vector<int> k_values{8, 16, 32, 64};

  void validate(const TimeGrid& grid, int t_index) const;
  /// Ramp of height `upsilon` ending at node t_index, frozen afterwards.
  StoppedPath ramp(const TimeGrid& grid, int t_index, int dim, int k,
                   const Eigen::VectorXd& upsilon) const;
};

/// Linear extrapolation in 1/k through the two largest ramps, evaluated at
/// 1/k = dt, where the ramp collapses onto the nodal hat at t.
double extrapolate_ramp_limit(std::span<const int> k_values, std::span<const double> values,
                              double dt);

struct RampTraceEntry {
  int coord = 0;
  int k = 0;
  double value = 0.0;
};

struct AtomEstimate {
  Eigen::VectorXd atom;
  std::vector<RampTraceEntry> trace;
};

/// Atom of the Riesz measure at {t}, one coordinate at a time.  With three
/// or more ramps the two successive extrapolations must agree within
/// 1e-3 (1 + |limit|); otherwise ConvergenceError carries the ramp values.
AtomEstimate atom_at_t(const Functional& f, const StoppedPath& p, const RampFamily& ramps,
                       std::optional<double> h = std::nullopt);

/// Ramp-limit of D^2 f (xi_k upsilon1, xi_k upsilon2).
double bilinear_ramp_limit(const Functional& f, const StoppedPath& p, const RampFamily& ramps,
                           const Eigen::VectorXd& upsilon1, const Eigen::VectorXd& upsilon2,
                           std::optional<double> h = std::nullopt,
                           std::vector<RampTraceEntry>* trace = nullptr);

/// Atom-atom block of the bilinear measure (d x d, by polarization on
/// coordinate pairs).
Eigen::MatrixXd bilinear_atom(const Functional& f, const StoppedPath& p, const RampFamily& ramps,
                              std::optional<double> h = std::nullopt);

struct RieszEstimate {
  RieszRepresentation representation;
  std::vector<RampTraceEntry> ramp_trace;
};

/// Nodal masses from directional derivatives along the nodal hats, with the
/// top node split from the atom via atom_at_t.  The hat sweep runs in
/// parallel; results are placed by index.
RieszEstimate estimate_riesz_measure(const Functional& f, const StoppedPath& p,
                                     const RampFamily& ramps = {},
                                     std::optional<double> h = std::nullopt);

/// Nodal pairwise weights and atom-atom block for the second derivative.
BilinearRepresentation estimate_bilinear_representation(const Functional& f, const StoppedPath& p,
                                                        const RampFamily& ramps = {},
                                                        std::optional<double> h = std::nullopt);

/// Nodal hat at node i along coordinate j (unit value at t_i, zero at other
/// nodes), as a path on p's grid.
StoppedPath nodal_hat(const TimeGrid& grid, int dim, int node, int coord);

/// Frechet-side time derivative: (f(s, gamma_t) - f(t, gamma)) / eps with
/// gamma_t the path frozen at t; eps defaults to dt.  With levels > 1 the
/// quotients at eps, eps/2, ... are Richardson-extrapolated.
double frechet_time_derivative(const Functional& f, const StoppedPath& p,
                               std::optional<double> eps = std::nullopt, int levels = 1);

}  // namespace pathcalc
