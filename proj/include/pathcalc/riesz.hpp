#pragma once

#include <Eigen/Dense>

#include "pathcalc/path.hpp"

namespace pathcalc {

/// Discrete measure representing the Frechet derivative at a stopped path:
///   D(eta) = sum_{i <= k} <w_i, eta(t_i)> + <atom, eta(t)>.
/// Row i of `weights` holds the nodal mass at t_i (k+1 rows, dim columns);
/// `atom` is the mass sitting on the singleton {t}.
struct RieszRepresentation {
  TimeGrid grid{1.0, 1};
  int t_index = 0;
  Eigen::MatrixXd weights;
  Eigen::VectorXd atom;

  static RieszRepresentation zero(const TimeGrid& grid, int t_index, int dim);
  int dim() const noexcept { return static_cast<int>(atom.size()); }

  /// Value on a continuous direction (bump ignored, eta sampled on [0, t]).
  double apply(const StoppedPath& eta) const;
};

/// Extension to C + B_t: the density part acts on phi over [0, t] and the
/// atom on phi(t) + upsilon.
double apply_extended_derivative(const RieszRepresentation& rep, const StoppedPath& phi,
                                 const Eigen::VectorXd& upsilon);

/// Discrete representation of the second Frechet derivative.
///
/// `weights` is indexed by (node*dim + coord) on both sides for nodes 0..k.
/// Row/column block k (the stop node) holds node-k interactions with the
/// rest of the path; the diagonal block (k, k) holds only what remains after
/// removing `atom_atom`, the mass on {t} x {t}.  Under the extension the
/// off-diagonal k-blocks and `atom_atom` see phi(t) + upsilon, the residual
/// (k, k) block sees phi(t) only.
struct BilinearRepresentation {
  TimeGrid grid{1.0, 1};
  int t_index = 0;
  Eigen::MatrixXd weights;
  Eigen::MatrixXd atom_atom;

  int dim() const noexcept { return static_cast<int>(atom_atom.rows()); }
  double apply(const StoppedPath& eta1, const StoppedPath& eta2) const;
  double apply_extended(const StoppedPath& phi1, const Eigen::VectorXd& upsilon1,
                        const StoppedPath& phi2, const Eigen::VectorXd& upsilon2) const;
};

}  // namespace pathcalc
