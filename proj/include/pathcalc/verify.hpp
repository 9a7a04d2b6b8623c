#pragma once

// Numerical checks of the functional Ito formula, the generator identity in
// its Frechet and Dupire forms, and the coherence of the two derivative
// notions.

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pathcalc/dupire_diff.hpp"
#include "pathcalc/frechet_diff.hpp"
#include "pathcalc/sfde.hpp"

namespace pathcalc {

struct ConvergenceLevel {
  double level = 0.0;
  double value = 0.0;
  double reference = std::numeric_limits<double>::quiet_NaN();
  double error = std::numeric_limits<double>::quiet_NaN();
  double std_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  /// Slope of log(error) against log(level); empty when every error is
  /// below 1e-12 and no order can be read off.
  std::optional<double> fitted_order;
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double intercept_std_error = 0.0;
};

/// Least-squares slope of log(error) on log(level) over the levels whose
/// error exceeds 1e-12; empty if fewer than two qualify.
std::optional<double> fit_order(const std::vector<ConvergenceLevel>& levels);

enum class QvMode { Realized, Dt };

/// LHS - RHS of the discretized functional Ito formula along x on
/// [0, t_K], K = x.stop_index():
///   f(x_K) - f(x_0) - sum dt D_t f(x_i) - sum <D_x f(x_i), dX_i> - 1/2 sum QV_i
/// with QV_i = dX_i^T H dX_i (realized) or tr(sigma^T H sigma) dt (dt mode,
/// needs `model`).  Derivatives at each prefix come from dupire_diff.
double ito_residual(const Functional& f, const StoppedPath& x, const FdConfig& cfg, QvMode mode,
                    const SfdeModel* model = nullptr);

struct ItoStudyConfig {
  double horizon = 1.0;
  double x0 = 0.0;
  QvMode mode = QvMode::Dt;
  FdConfig fd;
};

/// RMS of ito_residual over the ensemble at each resolution (level = dt).
/// All resolutions share one Brownian path per sample, drawn on the finest.
ConvergenceReport ito_convergence_study(const Functional& f, const SfdeModel& model,
                                        const std::vector<int>& resolutions, const NoisePlan& plan,
                                        const ItoStudyConfig& cfg = {}, int workers = 0);

/// Monte Carlo difference quotients (E f(X stopped at t + eps) - f(p)) / eps
/// with common random numbers across eps (level = eps).  Each path's
/// quotients are fitted by a polynomial of degree `degree` in eps; the
/// intercept is the mean of the per-path values at eps = 0 and its standard
/// error is their sample standard error.  `reference`, if finite, fills the
/// reference/error columns.
ConvergenceReport generator_lhs(const Functional& f, const SfdeModel& model,
                                const StoppedPath& initial, const std::vector<double>& epsilons,
                                const NoisePlan& plan, int degree = 1,
                                double reference = std::numeric_limits<double>::quiet_NaN(),
                                int workers = 0);

/// D_t f + <D_x f, b> + 1/2 tr(sigma^T D_xx f sigma) from numerical jets.
double generator_rhs_dupire(const Functional& f, const SfdeModel& model, const StoppedPath& p,
                            const FdConfig& cfg = {});

/// Frechet-side time derivative plus the atom terms: <atom, b> and
/// 1/2 sum_j of the bilinear ramp limit along sigma e_j.  The time
/// derivative uses cfg's horizontal step and Richardson levels.
double generator_rhs_frechet(const Functional& f, const SfdeModel& model, const StoppedPath& p,
                             const RampFamily& ramps = {}, std::optional<double> h = std::nullopt,
                             const FdConfig& cfg = {});

struct CoherenceReport {
  double dt_frechet = 0.0;
  double dt_dupire = 0.0;
  Eigen::VectorXd atom_mu;
  Eigen::VectorXd dx_dupire;
  Eigen::MatrixXd atom_lambda;
  Eigen::MatrixXd dxx_dupire;
  double max_abs_gap = 0.0;
};

CoherenceReport coherence_report(const Functional& f, const StoppedPath& p, const FdConfig& cfg = {},
                                 const RampFamily& ramps = {});

}  // namespace pathcalc
