#include "pathcalc/functional.hpp"

#include <bit>
#include <cmath>
#include <vector>

#include "pathcalc/errors.hpp"
#include "pathcalc/rng.hpp"

namespace pathcalc {

DupireJet Functional::analytic_jet(const StoppedPath& p) const {
  if (!jet_) throw UnsupportedError("functional '" + name_ + "' has no analytic Dupire jet");
  return jet_(p);
}

RieszRepresentation Functional::analytic_riesz(const StoppedPath& p) const {
  if (!riesz_) throw UnsupportedError("functional '" + name_ + "' has no analytic Riesz representation");
  return riesz_(p);
}

double evaluate(const Functional& f, const StoppedPath& p) {
  try {
    return f(p);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError("evaluation of '" + f.name() + "' failed: " + e.what());
  }
}

bool check_non_anticipative(const Functional& f, const StoppedPath& p, std::uint64_t tamper_seed) {
  const int k = p.stop_index();
  const int n = p.grid().steps();
  if (k >= n) throw DomainError("check_non_anticipative: path is stopped at the horizon");
  std::vector<double> tail(static_cast<std::size_t>(n - k) * p.dim());
  const CounterRng rng(tamper_seed);
  for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = 10.0 * rng.normal(0, i);
  const double a = evaluate(f, p);
  const double b = evaluate(f, p.with_tail(tail));
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

RieszRepresentation RieszRepresentation::zero(const TimeGrid& grid, int t_index, int dim) {
  RieszRepresentation rep;
  rep.grid = grid;
  rep.t_index = t_index;
  rep.weights = Eigen::MatrixXd::Zero(t_index + 1, dim);
  rep.atom = Eigen::VectorXd::Zero(dim);
  return rep;
}

namespace {

void check_compatible(const RieszRepresentation& rep, const StoppedPath& phi) {
  if (!(phi.grid() == rep.grid)) throw DomainError("Riesz representation: grid mismatch");
  if (phi.dim() != rep.dim()) throw DomainError("Riesz representation: dimension mismatch");
}

}  // namespace

double RieszRepresentation::apply(const StoppedPath& eta) const {
  return apply_extended_derivative(*this, eta, Eigen::VectorXd::Zero(dim()));
}

double apply_extended_derivative(const RieszRepresentation& rep, const StoppedPath& phi,
                                 const Eigen::VectorXd& upsilon) {
  check_compatible(rep, phi);
  if (upsilon.size() != rep.dim()) throw DomainError("apply_extended_derivative: upsilon dimension");
  double s = 0.0;
  for (int i = 0; i <= rep.t_index; ++i)
    for (int j = 0; j < rep.dim(); ++j) s += rep.weights(i, j) * phi.sample(i, j);
  for (int j = 0; j < rep.dim(); ++j) s += rep.atom(j) * (phi.sample(rep.t_index, j) + upsilon(j));
  return s;
}

double BilinearRepresentation::apply(const StoppedPath& eta1, const StoppedPath& eta2) const {
  return apply_extended(eta1, Eigen::VectorXd::Zero(dim()), eta2, Eigen::VectorXd::Zero(dim()));
}

double BilinearRepresentation::apply_extended(const StoppedPath& phi1, const Eigen::VectorXd& ups1,
                                              const StoppedPath& phi2,
                                              const Eigen::VectorXd& ups2) const {
  const int d = dim();
  const int k = t_index;
  for (const auto* phi : {&phi1, &phi2}) {
    if (!(phi->grid() == grid)) throw DomainError("bilinear representation: grid mismatch");
    if (phi->dim() != d) throw DomainError("bilinear representation: dimension mismatch");
  }
  const int m = (k + 1) * d;
  Eigen::VectorXd a(m), b(m), a_ext(m), b_ext(m);
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j < d; ++j) {
      a(i * d + j) = phi1.sample(i, j);
      b(i * d + j) = phi2.sample(i, j);
    }
  }
  a_ext = a;
  b_ext = b;
  a_ext.segment(k * d, d) += ups1;
  b_ext.segment(k * d, d) += ups2;

  const int body = k * d;
  double s = 0.0;
  s += a.head(body).dot(weights.topLeftCorner(body, body) * b.head(body));
  s += a.head(body).dot(weights.topRightCorner(body, d) * b_ext.tail(d));
  s += a_ext.tail(d).dot(weights.bottomLeftCorner(d, body) * b.head(body));
  s += a.tail(d).dot(weights.bottomRightCorner(d, d) * b.tail(d));
  s += a_ext.tail(d).dot(atom_atom * b_ext.tail(d));
  return s;
}

}  // namespace pathcalc
