#pragma once

#include <optional>

#include <Eigen/Dense>

#include "pathcalc/functional.hpp"

namespace pathcalc {

/// Step parameters for the Dupire finite-difference estimators.
///
/// Unset steps fall back to the defaults: h = 1e-4 * (1 + |gamma(t)|) for the
/// vertical bump and eps = dt for the horizontal extension.
struct FdConfig {
  std::optional<double> h_vertical;
  std::optional<double> eps_horizontal;
  int richardson_levels = 1;

  double vertical_step(const StoppedPath& p) const;
  double horizontal_step(const StoppedPath& p) const;
  void validate() const;
};

/// Central differences of bumps +-h e_i.
Eigen::VectorXd vertical_derivative(const Functional& f, const StoppedPath& p,
                                    const FdConfig& cfg = {});

/// Second central differences on the diagonal, four-point mixed stencil off
/// the diagonal, then symmetrized.
Eigen::MatrixXd vertical_hessian(const Functional& f, const StoppedPath& p,
                                 const FdConfig& cfg = {});

/// One-sided forward difference along the flat extension (s >= t only).
/// Throws BoundaryError when t + eps exceeds the horizon.
double horizontal_derivative(const Functional& f, const StoppedPath& p, const FdConfig& cfg = {});

DupireJet numerical_dupire_jet(const Functional& f, const StoppedPath& p, const FdConfig& cfg = {});

/// Vertical derivative at h and h/2; the spread is the only error indicator
/// offered for functionals outside the smooth catalog.
struct StepHalvingDiagnostic {
  Eigen::VectorXd at_h;
  Eigen::VectorXd at_half_h;
  double spread = 0.0;
};
StepHalvingDiagnostic vertical_step_halving(const Functional& f, const StoppedPath& p,
                                            const FdConfig& cfg = {});

/// Richardson tableau for estimates at steps h, h/2, h/4, ... whose leading
/// error term is O(h^order) and continues in powers h^(order+1), ...
/// Returns the most extrapolated entry.
double richardson(std::span<const double> estimates, int order, int order_increment);

}  // namespace pathcalc
