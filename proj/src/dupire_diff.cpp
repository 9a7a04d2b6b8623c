#include "pathcalc/dupire_diff.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <vector>

#include "pathcalc/errors.hpp"

namespace pathcalc {

namespace {

constexpr int kMaxRichardson = 3;

double checked_eval(const Functional& f, const StoppedPath& p) {
  const double v = evaluate(f, p);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite value of '" << f.name() << "' at stop index " << p.stop_index() << ", bump (";
    for (int j = 0; j < p.dim(); ++j) os << (j ? ", " : "") << p.bump()[j];
    os << ")";
    throw NumericalError(os.str());
  }
  return v;
}

double bumped(const Functional& f, const StoppedPath& p, const Eigen::VectorXd& x) {
  return checked_eval(f, vertical_bump(p, std::span<const double>(x.data(), x.size())));
}

Eigen::VectorXd gradient_at(const Functional& f, const StoppedPath& p, double h) {
  const int d = p.dim();
  Eigen::VectorXd g(d);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    e(i) = h;
    const double up = bumped(f, p, e);
    const double down = bumped(f, p, -e);
    e(i) = 0.0;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd hessian_at(const Functional& f, const StoppedPath& p, double h) {
  const int d = p.dim();
  const double centre = checked_eval(f, p);
  Eigen::MatrixXd hess(d, d);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    e(i) = h;
    hess(i, i) = (bumped(f, p, e) - 2.0 * centre + bumped(f, p, -e)) / (h * h);
    e(i) = 0.0;
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
      a(i) = h;
      b(j) = h;
      const double pp = bumped(f, p, a + b);
      const double pm = bumped(f, p, a - b);
      const double mp = bumped(f, p, -a + b);
      const double mm = bumped(f, p, -a - b);
      hess(i, j) = (pp - pm - mp + mm) / (4.0 * h * h);
      hess(j, i) = hess(i, j);
    }
  }
  return hess;
}

int levels_of(const FdConfig& cfg) { return cfg.richardson_levels; }

}  // namespace

double FdConfig::vertical_step(const StoppedPath& p) const {
  if (h_vertical) return *h_vertical;
  double sq = 0.0;
  for (int j = 0; j < p.dim(); ++j) sq += p.endpoint(j) * p.endpoint(j);
  return 1e-4 * (1.0 + std::sqrt(sq));
}

double FdConfig::horizontal_step(const StoppedPath& p) const {
  return eps_horizontal ? *eps_horizontal : p.grid().dt();
}

void FdConfig::validate() const {
  if (h_vertical && !(*h_vertical > 0.0)) throw DomainError("FdConfig: h_vertical must be > 0");
  if (eps_horizontal && !(*eps_horizontal > 0.0))
    throw DomainError("FdConfig: eps_horizontal must be > 0");
  if (richardson_levels < 1 || richardson_levels > kMaxRichardson)
    throw DomainError("FdConfig: richardson_levels must be in [1, 3]");
}

double richardson(std::span<const double> estimates, int order, int order_increment) {
  std::vector<double> row(estimates.begin(), estimates.end());
  const int n = static_cast<int>(row.size());
  for (int col = 1; col < n; ++col) {
    const double factor = std::ldexp(1.0, order + (col - 1) * order_increment) - 1.0;
    for (int i = n - 1; i >= col; --i) row[i] = row[i] + (row[i] - row[i - 1]) / factor;
  }
  return row.back();
}

Eigen::VectorXd vertical_derivative(const Functional& f, const StoppedPath& p, const FdConfig& cfg) {
  cfg.validate();
  const double h = cfg.vertical_step(p);
  const int levels = levels_of(cfg);
  if (levels == 1) return gradient_at(f, p, h);
  std::vector<Eigen::VectorXd> est;
  for (int l = 0; l < levels; ++l) est.push_back(gradient_at(f, p, std::ldexp(h, -l)));
  Eigen::VectorXd out(p.dim());
  std::vector<double> column(levels);
  for (int i = 0; i < p.dim(); ++i) {
    for (int l = 0; l < levels; ++l) column[l] = est[l](i);
    out(i) = richardson(column, 2, 2);
  }
  return out;
}

Eigen::MatrixXd vertical_hessian(const Functional& f, const StoppedPath& p, const FdConfig& cfg) {
  cfg.validate();
  const double h = cfg.vertical_step(p);
  const int levels = levels_of(cfg);
  Eigen::MatrixXd out;
  if (levels == 1) {
    out = hessian_at(f, p, h);
  } else {
    std::vector<Eigen::MatrixXd> est;
    for (int l = 0; l < levels; ++l) est.push_back(hessian_at(f, p, std::ldexp(h, -l)));
    out.resize(p.dim(), p.dim());
    std::vector<double> column(levels);
    for (int i = 0; i < p.dim(); ++i) {
      for (int j = 0; j < p.dim(); ++j) {
        for (int l = 0; l < levels; ++l) column[l] = est[l](i, j);
        out(i, j) = richardson(column, 2, 2);
      }
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (out + out.transpose());
  return sym;
}

double horizontal_derivative(const Functional& f, const StoppedPath& p, const FdConfig& cfg) {
  cfg.validate();
  const TimeGrid& grid = p.grid();
  const int k = p.stop_index();
  if (k >= grid.steps())
    throw BoundaryError("horizontal derivative is undefined at the horizon (one-sided, s >= t)");
  const int m = grid.steps_in(cfg.horizontal_step(p));
  if (m < 1) throw DomainError("horizontal step must span at least one grid step");
  if (k + m > grid.steps()) {
    std::ostringstream os;
    os << "horizontal step " << cfg.horizontal_step(p) << " from t = " << p.stop_time()
       << " exceeds the horizon " << grid.horizon();
    throw BoundaryError(os.str());
  }
  int levels = 1;
  while (levels < cfg.richardson_levels && (m >> levels) >= 1 && (m % (1 << levels)) == 0) ++levels;

  const double base = checked_eval(f, p);
  std::vector<double> est;
  for (int l = 0; l < levels; ++l) {
    const int ml = m >> l;
    const double moved = checked_eval(f, horizontal_extend_to_index(p, k + ml));
    est.push_back((moved - base) / (ml * grid.dt()));
  }
  return levels == 1 ? est.front() : richardson(est, 1, 1);
}

DupireJet numerical_dupire_jet(const Functional& f, const StoppedPath& p, const FdConfig& cfg) {
  DupireJet jet;
  jet.dt = horizontal_derivative(f, p, cfg);
  jet.dx = vertical_derivative(f, p, cfg);
  jet.dxx = vertical_hessian(f, p, cfg);
  return jet;
}

StepHalvingDiagnostic vertical_step_halving(const Functional& f, const StoppedPath& p,
                                            const FdConfig& cfg) {
  FdConfig single = cfg;
  single.richardson_levels = 1;
  const double h = single.vertical_step(p);
  StepHalvingDiagnostic diag;
  diag.at_h = gradient_at(f, p, h);
  diag.at_half_h = gradient_at(f, p, 0.5 * h);
  diag.spread = (diag.at_h - diag.at_half_h).cwiseAbs().maxCoeff();
  return diag;
}

}  // namespace pathcalc
