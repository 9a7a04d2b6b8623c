#include "pathcalc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathcalc/errors.hpp"
#include "pathcalc/parallel.hpp"

namespace pathcalc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::VectorXd drift_at(const SfdeModel& model, const StoppedPath& p) {
  Eigen::VectorXd b = model.drift(p.stop_time(), p);
  if (b.size() != p.dim()) throw DomainError("model '" + model.name + "': drift has wrong dimension");
  return b;
}

Eigen::MatrixXd diffusion_at(const SfdeModel& model, const StoppedPath& p) {
  Eigen::MatrixXd s = model.diffusion(p.stop_time(), p);
  if (s.rows() != p.dim()) throw DomainError("model '" + model.name + "': diffusion has wrong shape");
  return s;
}

// Weights c with c . q = value at 0 of the least-squares polynomial of the
// given degree through (x_e, q_e).
Eigen::VectorXd intercept_weights(const std::vector<double>& x, int degree) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd v(n, degree + 1);
  for (int e = 0; e < n; ++e) {
    double power = 1.0;
    for (int c = 0; c <= degree; ++c) {
      v(e, c) = power;
      power *= x[e];
    }
  }
  const Eigen::MatrixXd pinv = v.completeOrthogonalDecomposition().pseudoInverse();
  return pinv.row(0).transpose();
}

}  // namespace

std::optional<double> fit_order(const std::vector<ConvergenceLevel>& levels) {
  std::vector<double> lx, ly;
  for (const auto& l : levels) {
    if (std::isfinite(l.error) && l.error > 1e-12 && l.level > 0.0) {
      lx.push_back(std::log(l.level));
      ly.push_back(std::log(l.error));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  return fit_line(lx, ly).slope;
}

double ito_residual(const Functional& f, const StoppedPath& x, const FdConfig& cfg, QvMode mode,
                    const SfdeModel* model) {
  if (x.has_bump()) throw DomainError("ito_residual: path carries an endpoint bump");
  if (mode == QvMode::Dt && model == nullptr) throw UsageError("ito_residual: dt mode needs a model");
  const int steps = x.stop_index();
  const int d = x.dim();
  const double dt = x.grid().dt();

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(steps) * 3);
  Eigen::VectorXd dx(d);
  for (int i = 0; i < steps; ++i) {
    const StoppedPath prefix = stop_at_index(x, i);
    try {
      const double dtf = horizontal_derivative(f, prefix, cfg);
      const Eigen::VectorXd grad = vertical_derivative(f, prefix, cfg);
      const Eigen::MatrixXd hess = vertical_hessian(f, prefix, cfg);
      for (int j = 0; j < d; ++j) dx(j) = x.sample(i + 1, j) - x.sample(i, j);
      double qv = 0.0;
      if (mode == QvMode::Realized) {
        qv = dx.dot(hess * dx);
      } else {
        const Eigen::MatrixXd s = diffusion_at(*model, prefix);
        qv = (s.transpose() * hess * s).trace() * dt;
      }
      terms.push_back(dtf * dt);
      terms.push_back(grad.dot(dx));
      terms.push_back(0.5 * qv);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "ito_residual: node " << i << ": " << e.what();
      throw NumericalError(os.str());
    }
  }
  const double lhs = evaluate(f, x) - evaluate(f, stop_at_index(x, 0));
  return lhs - pairwise_sum(terms);
}

ConvergenceReport ito_convergence_study(const Functional& f, const SfdeModel& model,
                                        const std::vector<int>& resolutions, const NoisePlan& plan,
                                        const ItoStudyConfig& cfg, int workers) {
  if (resolutions.empty()) throw DomainError("ito_convergence_study: no resolutions");
  if (model.state_dim != 1) throw DomainError("ito_convergence_study: scalar models only");
  if (plan.n_paths == 0) throw DomainError("ito_convergence_study: need at least one path");
  int finest = 0;
  for (int n : resolutions) {
    if (!is_power_of_two(n)) throw DomainError("ito_convergence_study: resolutions must be powers of two");
    finest = std::max(finest, n);
  }
  NoisePlan shared = plan;
  if (shared.fine_steps < finest) shared.fine_steps = finest;
  if (shared.fine_steps % finest != 0)
    throw GridAlignmentError("ito_convergence_study: noise grid does not refine the resolutions");

  ConvergenceReport report;
  for (int n : resolutions) {
    const TimeGrid grid(cfg.horizon, n);
    const std::vector<double> x0{cfg.x0};
    const StoppedPath initial = StoppedPath::constant(grid, x0, 0);
    std::vector<double> squares(plan.n_paths);
    parallel_for(
        plan.n_paths,
        [&](std::size_t j) {
          const auto dw = shared.increments(j, grid, model.noise_dim, 0, n);
          const StoppedPath x = euler_solve(model, initial, cfg.horizon, dw);
          const double r = ito_residual(f, x, cfg.fd, cfg.mode, &model);
          squares[j] = r * r;
        },
        workers);
    const SampleStats st = sample_stats(squares);
    ConvergenceLevel level;
    level.level = grid.dt();
    level.value = std::sqrt(st.mean);
    level.reference = 0.0;
    level.error = level.value;
    // Delta method for the square root of a mean.
    level.std_error = level.value > 0.0 ? st.std_error / (2.0 * level.value) : 0.0;
    report.levels.push_back(level);
  }
  report.fitted_order = fit_order(report.levels);
  if (report.fitted_order) {
    std::vector<double> lx, ly;
    for (const auto& l : report.levels) {
      if (l.error > 1e-12) {
        lx.push_back(std::log(l.level));
        ly.push_back(std::log(l.error));
      }
    }
    report.intercept = fit_line(lx, ly).intercept;
  }
  return report;
}

ConvergenceReport generator_lhs(const Functional& f, const SfdeModel& model,
                                const StoppedPath& initial, const std::vector<double>& epsilons,
                                const NoisePlan& plan, int degree, double reference, int workers) {
  const std::size_t ne = epsilons.size();
  if (ne == 0) throw DomainError("generator_lhs: no epsilons");
  if (plan.n_paths == 0) throw DomainError("generator_lhs: need at least one path");
  if (degree < 0 || static_cast<std::size_t>(degree) >= ne)
    throw DomainError("generator_lhs: extrapolation degree must be below the number of epsilons");
  const TimeGrid& grid = initial.grid();
  const int k = initial.stop_index();
  std::vector<int> offsets(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    if (!(epsilons[e] > 0.0)) throw DomainError("generator_lhs: epsilons must be positive");
    if (e > 0 && !(epsilons[e] < epsilons[e - 1]))
      throw DomainError("generator_lhs: epsilons must be decreasing");
    offsets[e] = grid.steps_in(epsilons[e]);
    if (offsets[e] < 1) throw GridAlignmentError("generator_lhs: epsilon shorter than one step");
  }
  if (k + offsets[0] > grid.steps()) throw BoundaryError("generator_lhs: t + epsilon exceeds the horizon");

  std::vector<double> scaled(ne);
  for (std::size_t e = 0; e < ne; ++e) scaled[e] = epsilons[e] / epsilons[0];
  const Eigen::VectorXd weights = intercept_weights(scaled, degree);

  const double base = evaluate(f, initial);
  if (!std::isfinite(base)) throw NumericalError("generator_lhs: non-finite value at the initial path");
  const double until = grid.time(k + offsets[0]);

  std::vector<double> quotients(plan.n_paths * ne);
  std::vector<double> intercepts(plan.n_paths);
  parallel_for(
      plan.n_paths,
      [&](std::size_t j) {
        const auto dw = plan.increments(j, grid, model.noise_dim, k, k + offsets[0]);
        const StoppedPath x = euler_solve(model, initial, until, dw);
        double c = 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
          const double q = (evaluate(f, stop_at_index(x, k + offsets[e])) - base) / epsilons[e];
          if (!std::isfinite(q)) throw NumericalError("generator_lhs: non-finite difference quotient");
          quotients[j * ne + e] = q;
          c += weights(static_cast<Eigen::Index>(e)) * q;
        }
        intercepts[j] = c;
      },
      workers);

  ConvergenceReport report;
  std::vector<double> column(plan.n_paths);
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t j = 0; j < plan.n_paths; ++j) column[j] = quotients[j * ne + e];
    const SampleStats st = sample_stats(column);
    ConvergenceLevel level;
    level.level = epsilons[e];
    level.value = st.mean;
    level.std_error = st.std_error;
    level.reference = reference;
    level.error = std::abs(st.mean - reference);
    report.levels.push_back(level);
  }
  const SampleStats is = sample_stats(intercepts);
  report.intercept = is.mean;
  report.intercept_std_error = is.std_error;
  report.fitted_order = fit_order(report.levels);
  return report;
}

double generator_rhs_dupire(const Functional& f, const SfdeModel& model, const StoppedPath& p,
                            const FdConfig& cfg) {
  const DupireJet jet = numerical_dupire_jet(f, p, cfg);
  const Eigen::VectorXd b = drift_at(model, p);
  const Eigen::MatrixXd s = diffusion_at(model, p);
  return jet.dt + jet.dx.dot(b) + 0.5 * (s.transpose() * jet.dxx * s).trace();
}

double generator_rhs_frechet(const Functional& f, const SfdeModel& model, const StoppedPath& p,
                             const RampFamily& ramps, std::optional<double> h, const FdConfig& cfg) {
  const double dt = frechet_time_derivative(f, p, cfg.eps_horizontal, cfg.richardson_levels);
  const Eigen::VectorXd b = drift_at(model, p);
  const Eigen::MatrixXd s = diffusion_at(model, p);
  double linear = 0.0;
  if (b.norm() > 0.0) linear = atom_at_t(f, p, ramps, h).atom.dot(b);
  double quadratic = 0.0;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    const Eigen::VectorXd column = s.col(j);
    if (column.norm() > 0.0) quadratic += bilinear_ramp_limit(f, p, ramps, column, column, h);
  }
  return dt + linear + 0.5 * quadratic;
}

CoherenceReport coherence_report(const Functional& f, const StoppedPath& p, const FdConfig& cfg,
                                 const RampFamily& ramps) {
  CoherenceReport r;
  const DupireJet jet = numerical_dupire_jet(f, p, cfg);
  r.dt_dupire = jet.dt;
  r.dx_dupire = jet.dx;
  r.dxx_dupire = jet.dxx;
  r.dt_frechet = frechet_time_derivative(f, p, cfg.eps_horizontal, cfg.richardson_levels);
  r.atom_mu = atom_at_t(f, p, ramps).atom;
  r.atom_lambda = bilinear_atom(f, p, ramps);
  r.max_abs_gap = std::max({std::abs(r.dt_frechet - r.dt_dupire),
                            (r.atom_mu - r.dx_dupire).cwiseAbs().maxCoeff(),
                            (r.atom_lambda - r.dxx_dupire).cwiseAbs().maxCoeff()});
  return r;
}

}  // namespace pathcalc
