#include "pathcalc/frechet_diff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathcalc/dupire_diff.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/parallel.hpp"

namespace pathcalc {

namespace {

// Second differences lose ~eps|f|/h^2 to rounding, so they use a wider step
// than first differences.
double default_second_step(const StoppedPath& eta1, const StoppedPath& eta2) {
  return 1e-3 / (1.0 + std::max(sup_norm(eta1), sup_norm(eta2)));
}

double checked(const Functional& f, const StoppedPath& p) {
  const double v = evaluate(f, p);
  if (!std::isfinite(v)) throw NumericalError("non-finite value of '" + f.name() + "' on perturbed path");
  return v;
}

Eigen::VectorXd unit(int dim, int coord) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e(coord) = 1.0;
  return e;
}

void check_ramp_budget(const RampFamily& ramps, std::span<const double> values, double dt,
                       const std::string& what) {
  const std::size_t n = values.size();
  if (n < 3) return;
  const std::span<const int> ks(ramps.k_values);
  const double coarse = extrapolate_ramp_limit(ks.subspan(n - 3, 2), values.subspan(n - 3, 2), dt);
  const double fine = extrapolate_ramp_limit(ks.subspan(n - 2, 2), values.subspan(n - 2, 2), dt);
  // For d_k = a + b/k + c/k^2 with doubling k, the fine extrapolation is off
  // by a third of the gap between successive extrapolations.
  if (std::abs(coarse - fine) / 3.0 > 1e-3 * (1.0 + std::abs(fine))) {
    std::ostringstream os;
    os << what << ": ramp sequence did not converge (successive limits " << coarse << " and " << fine
       << ")";
    throw ConvergenceError(os.str(), std::vector<double>(values.begin(), values.end()));
  }
}

}  // namespace

double default_directional_step(const StoppedPath& eta) { return 1e-4 / (1.0 + sup_norm(eta)); }

double directional_derivative(const Functional& f, const StoppedPath& p, const StoppedPath& eta,
                              std::optional<double> h) {
  const double step = h ? *h : default_directional_step(eta);
  if (!(step > 0.0)) throw DomainError("directional step must be > 0");
  const double up = checked(f, perturb(p, eta, step));
  const double down = checked(f, perturb(p, eta, -step));
  return (up - down) / (2.0 * step);
}

double second_directional_derivative(const Functional& f, const StoppedPath& p,
                                     const StoppedPath& eta1, const StoppedPath& eta2,
                                     std::optional<double> h) {
  const double step = h ? *h : default_second_step(eta1, eta2);
  if (!(step > 0.0)) throw DomainError("directional step must be > 0");
  const double pp = checked(f, perturb(p, eta1, step, eta2, step));
  const double pm = checked(f, perturb(p, eta1, step, eta2, -step));
  const double mp = checked(f, perturb(p, eta1, -step, eta2, step));
  const double mm = checked(f, perturb(p, eta1, -step, eta2, -step));
  return (pp - pm - mp + mm) / (4.0 * step * step);
}

void RampFamily::validate(const TimeGrid& grid, int t_index) const {
  if (k_values.size() < 2) throw DomainError("ramp family needs at least two k values");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    const int k = k_values[i];
    if (k < 1) throw DomainError("ramp k values must be positive");
    if (i > 0 && k <= k_values[i - 1]) throw DomainError("ramp k values must be increasing");
    const int m = grid.steps_in(1.0 / k);
    if (m < 1) throw GridAlignmentError("ramp support 1/k is shorter than one grid step");
    if (t_index - m < 0) {
      std::ostringstream os;
      os << "ramp support [t - 1/" << k << ", t] leaves [0, t]";
      throw DomainError(os.str());
    }
  }
}

StoppedPath RampFamily::ramp(const TimeGrid& grid, int t_index, int dim, int k,
                             const Eigen::VectorXd& upsilon) const {
  const int m = grid.steps_in(1.0 / k);
  std::vector<double> values(static_cast<std::size_t>(grid.node_count()) * dim, 0.0);
  for (int i = std::max(0, t_index - m); i < grid.node_count(); ++i) {
    const int r = std::min(i, t_index) - (t_index - m);
    const double height = static_cast<double>(r) / m;
    for (int j = 0; j < dim; ++j) values[static_cast<std::size_t>(i) * dim + j] = height * upsilon(j);
  }
  return StoppedPath::from_samples(grid, dim, std::move(values), t_index);
}

double extrapolate_ramp_limit(std::span<const int> k_values, std::span<const double> values,
                              double dt) {
  const std::size_t n = values.size();
  if (n < 2 || k_values.size() != n) throw DomainError("ramp extrapolation needs two or more points");
  const double xa = 1.0 / k_values[n - 2];
  const double xb = 1.0 / k_values[n - 1];
  const double va = values[n - 2];
  const double vb = values[n - 1];
  return vb + (vb - va) * (dt - xb) / (xb - xa);
}

AtomEstimate atom_at_t(const Functional& f, const StoppedPath& p, const RampFamily& ramps,
                       std::optional<double> h) {
  const int k = p.stop_index();
  const int d = p.dim();
  ramps.validate(p.grid(), k);
  AtomEstimate out;
  out.atom.resize(d);
  for (int j = 0; j < d; ++j) {
    std::vector<double> values;
    for (int kv : ramps.k_values) {
      const StoppedPath xi = ramps.ramp(p.grid(), k, d, kv, unit(d, j));
      values.push_back(directional_derivative(f, p, xi, h));
      out.trace.push_back({j, kv, values.back()});
    }
    check_ramp_budget(ramps, values, p.grid().dt(), "atom of '" + f.name() + "'");
    out.atom(j) = extrapolate_ramp_limit(ramps.k_values, values, p.grid().dt());
  }
  return out;
}

double bilinear_ramp_limit(const Functional& f, const StoppedPath& p, const RampFamily& ramps,
                           const Eigen::VectorXd& upsilon1, const Eigen::VectorXd& upsilon2,
                           std::optional<double> h, std::vector<RampTraceEntry>* trace) {
  const int k = p.stop_index();
  const int d = p.dim();
  ramps.validate(p.grid(), k);
  std::vector<double> values;
  for (int kv : ramps.k_values) {
    const StoppedPath xi1 = ramps.ramp(p.grid(), k, d, kv, upsilon1);
    const StoppedPath xi2 = ramps.ramp(p.grid(), k, d, kv, upsilon2);
    values.push_back(second_directional_derivative(f, p, xi1, xi2, h));
    if (trace) trace->push_back({-1, kv, values.back()});
  }
  check_ramp_budget(ramps, values, p.grid().dt(), "bilinear atom of '" + f.name() + "'");
  return extrapolate_ramp_limit(ramps.k_values, values, p.grid().dt());
}

Eigen::MatrixXd bilinear_atom(const Functional& f, const StoppedPath& p, const RampFamily& ramps,
                              std::optional<double> h) {
  const int d = p.dim();
  Eigen::MatrixXd out(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      out(a, b) = bilinear_ramp_limit(f, p, ramps, unit(d, a), unit(d, b), h);
      out(b, a) = out(a, b);
    }
  }
  return out;
}

StoppedPath nodal_hat(const TimeGrid& grid, int dim, int node, int coord) {
  std::vector<double> values(static_cast<std::size_t>(grid.node_count()) * dim, 0.0);
  for (int i = node; i < grid.node_count(); ++i)
    values[static_cast<std::size_t>(i) * dim + coord] = i == node ? 1.0 : 0.0;
  return StoppedPath::from_samples(grid, dim, std::move(values), grid.steps());
}

RieszEstimate estimate_riesz_measure(const Functional& f, const StoppedPath& p,
                                     const RampFamily& ramps, std::optional<double> h) {
  if (p.has_bump()) throw DomainError("estimate_riesz_measure: path carries an endpoint bump");
  const int k = p.stop_index();
  const int d = p.dim();
  AtomEstimate atom = atom_at_t(f, p, ramps, h);

  RieszEstimate out;
  out.representation = RieszRepresentation::zero(p.grid(), k, d);
  out.representation.atom = atom.atom;
  out.ramp_trace = std::move(atom.trace);

  std::vector<double> masses(static_cast<std::size_t>(k + 1) * d);
  parallel_for(masses.size(), [&](std::size_t idx) {
    const int node = static_cast<int>(idx) / d;
    const int coord = static_cast<int>(idx) % d;
    masses[idx] = directional_derivative(f, p, nodal_hat(p.grid(), d, node, coord), h);
  });
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j < d; ++j)
      out.representation.weights(i, j) = masses[static_cast<std::size_t>(i) * d + j];
  for (int j = 0; j < d; ++j) out.representation.weights(k, j) -= atom.atom(j);
  return out;
}

BilinearRepresentation estimate_bilinear_representation(const Functional& f, const StoppedPath& p,
                                                        const RampFamily& ramps,
                                                        std::optional<double> h) {
  if (p.has_bump()) throw DomainError("estimate_bilinear_representation: path carries a bump");
  const int k = p.stop_index();
  const int d = p.dim();
  const int m = (k + 1) * d;

  BilinearRepresentation rep;
  rep.grid = p.grid();
  rep.t_index = k;
  rep.atom_atom = bilinear_atom(f, p, ramps, h);
  rep.weights = Eigen::MatrixXd::Zero(m, m);

  std::vector<StoppedPath> hats;
  hats.reserve(m);
  for (int idx = 0; idx < m; ++idx) hats.push_back(nodal_hat(p.grid(), d, idx / d, idx % d));

  // Upper triangle, row by row; each row is written by one task.
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t row) {
    const int a = static_cast<int>(row);
    for (int b = a; b < m; ++b) rep.weights(a, b) = second_directional_derivative(f, p, hats[a], hats[b], h);
  });
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < a; ++b) rep.weights(a, b) = rep.weights(b, a);
  rep.weights.bottomRightCorner(d, d) -= rep.atom_atom;
  return rep;
}

double frechet_time_derivative(const Functional& f, const StoppedPath& p, std::optional<double> eps,
                               int levels) {
  if (p.has_bump()) throw DomainError("frechet_time_derivative: path carries an endpoint bump");
  const TimeGrid& grid = p.grid();
  const int k = p.stop_index();
  if (k >= grid.steps()) throw BoundaryError("time derivative is undefined at the horizon");
  const int m = grid.steps_in(eps ? *eps : grid.dt());
  if (m < 1) throw DomainError("time step must span at least one grid step");
  if (k + m > grid.steps()) throw BoundaryError("time derivative step exceeds the horizon");
  int used = 1;
  while (used < levels && (m % (1 << used)) == 0) ++used;

  const double base = checked(f, p);
  std::vector<double> est;
  for (int l = 0; l < used; ++l) {
    const int ml = m >> l;
    // gamma_t(.) is the frozen continuation; observe it at time t + eps.
    const StoppedPath later = stop_at_index(p, k + ml);
    est.push_back((checked(f, later) - base) / (ml * grid.dt()));
  }
  return used == 1 ? est.front() : richardson(est, 1, 1);
}

}  // namespace pathcalc
