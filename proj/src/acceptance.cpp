#include "pathcalc/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pathcalc/catalog.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/path_io.hpp"
#include "pathcalc/report.hpp"
#include "pathcalc/rng.hpp"
#include "pathcalc/verify.hpp"

namespace pathcalc {

namespace {

using Manifest = AcceptanceManifest;

std::string g3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Stop index uniform in [N/4, N-1].
int random_stop(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream) {
  const int lo = grid.steps() / 4;
  const int span = grid.steps() - lo;
  const double u = CounterRng(seed).uniform(stream, 1u << 20);
  return lo + std::min(span - 1, static_cast<int>(u * span));
}

StoppedPath sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream) {
  return random_continuous_path(grid, 1, random_stop(grid, seed, stream), seed, stream);
}

StoppedPath smooth_initial(const TimeGrid& grid, double t) {
  std::vector<double> v(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i) {
    const double s = grid.time(i);
    v[i] = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * s) + s;
  }
  return StoppedPath::scalar(grid, std::move(v), grid.index_of(t));
}

FdConfig richardson_time(const TimeGrid& grid) {
  FdConfig cfg;
  cfg.eps_horizontal = 2.0 * grid.dt();
  cfg.richardson_levels = 2;
  return cfg;
}

bool diffusion_free(const SfdeModel& model, const StoppedPath& p) {
  return model.diffusion(p.stop_time(), p).norm() == 0.0;
}

// Catalog derivative accuracy.
CriterionResult catalog_accuracy(const Manifest& m, CriterionResult r) {
  const TimeGrid grid(m.horizon, m.grid_n);
  double dx = 0.0, dt = 0.0, dxx = 0.0;
  std::uint64_t stream = 0;
  for (const auto& id : core_catalog_ids()) {
    const Functional f = make_functional(id);
    for (int s = 0; s < m.random_paths; ++s) {
      const StoppedPath p = sample_path(grid, m.seed + 1, stream++);
      const DupireJet exact = f.analytic_jet(p);
      DupireJet num = numerical_dupire_jet(f, p);
      // The left-point quadrature makes this one's flat-extension quotient
      // linear in eps rather than exact.
      if (id == "quadratic-integral") num.dt = horizontal_derivative(f, p, richardson_time(grid));
      dx = std::max(dx, (num.dx - exact.dx).cwiseAbs().maxCoeff());
      dt = std::max(dt, std::abs(num.dt - exact.dt));
      dxx = std::max(dxx, (num.dxx - exact.dxx).cwiseAbs().maxCoeff());
    }
  }
  r.pass = dx <= 1e-6 && dt <= 1e-6 && dxx <= 1e-4;
  r.detail = "max |dx| " + g3(dx) + " (1e-6), |dt| " + g3(dt) + " (1e-6), |dxx| " + g3(dxx) + " (1e-4)";
  return r;
}

// Finite-difference order checks.
CriterionResult fd_orders(const Manifest& m, CriterionResult r) {
  const TimeGrid grid(m.horizon, m.grid_n);
  std::ostringstream os;

  const Functional sine = make_functional("endpoint:sin");
  const std::vector<double> x0{m.fd_endpoint};
  const StoppedPath p = StoppedPath::constant(grid, x0, grid.steps() / 2);
  const double exact = sine.analytic_jet(p).dx(0);
  FdConfig coarse, fine;
  coarse.h_vertical = m.fd_vertical_h;
  fine.h_vertical = m.fd_vertical_h / 2;
  const double ev1 = std::abs(vertical_derivative(sine, p, coarse)(0) - exact);
  const double ev2 = std::abs(vertical_derivative(sine, p, fine)(0) - exact);
  const double vratio = ev1 / ev2;
  const bool vpass = vratio >= 3.5 && vratio <= 4.5;
  os << "vertical ratio " << g3(vratio) << " [3.5, 4.5]";

  const Functional ett = make_functional("endpoint-time:square");
  const std::vector<double> two{2.0};
  const StoppedPath q = StoppedPath::constant(grid, two, grid.steps() / 2);
  const double dt_exact = ett.analytic_jet(q).dt;
  FdConfig hc, hf;
  hc.eps_horizontal = m.fd_horizontal_steps * grid.dt();
  hf.eps_horizontal = m.fd_horizontal_steps * grid.dt() / 2;
  const double eh1 = std::abs(horizontal_derivative(ett, q, hc) - dt_exact);
  const double eh2 = std::abs(horizontal_derivative(ett, q, hf) - dt_exact);
  // Errors at rounding level carry no order information.
  const double floor = 1e-12 * (1.0 + std::abs(dt_exact));
  bool hpass = false;
  if (eh1 <= floor && eh2 <= floor) {
    os << "; horizontal ratio undefined on endpoint-time:square (errors " << g3(eh1) << ", " << g3(eh2)
       << ": the flat-extension quotient of t*f is exact)";
  } else {
    const double hratio = eh1 / eh2;
    hpass = hratio >= 1.7 && hratio <= 2.3;
    os << "; horizontal ratio " << g3(hratio) << " [1.7, 2.3]";
  }

  // Informational: a functional that is nonlinear in time under the flat extension.
  const Functional qi = make_functional("quadratic-integral");
  const StoppedPath g = sample_path(grid, m.seed + 2, 0);
  const double qexact = qi.analytic_jet(g).dt;
  const double qr = std::abs(horizontal_derivative(qi, g, hc) - qexact) /
                    std::abs(horizontal_derivative(qi, g, hf) - qexact);
  os << "; info: quadratic-integral horizontal ratio " << g3(qr);

  r.pass = vpass && hpass;
  r.detail = os.str();
  return r;
}

std::vector<std::string> extended_registry() {
  std::vector<std::string> ids;
  const auto core = core_catalog_ids();
  for (const auto& id : functional_ids()) {
    if (std::find(core.begin(), core.end(), id) != core.end()) continue;
    ids.push_back(id == "constant:<c>" ? "constant:1.5" : id);
  }
  return ids;
}

struct CoherenceSweep {
  double worst = 0.0;
  std::string worst_id;
  int errors = 0;
  std::string first_error;
};

CoherenceSweep sweep_coherence(const Manifest& m, const std::vector<std::string>& ids, std::uint64_t seed) {
  const TimeGrid grid(m.horizon, m.grid_n);
  const RampFamily ramps{m.ramps};
  CoherenceSweep out;
  std::uint64_t stream = 0;
  for (const auto& id : ids) {
    const Functional f = make_functional(id);
    for (int s = 0; s < m.random_paths; ++s) {
      const StoppedPath p = sample_path(grid, seed, stream++);
      try {
        const CoherenceReport c = coherence_report(f, p, {}, ramps);
        if (c.max_abs_gap > out.worst) {
          out.worst = c.max_abs_gap;
          out.worst_id = id;
        }
      } catch (const Error& e) {
        if (out.errors++ == 0) out.first_error = id + ": " + e.what();
      }
    }
  }
  return out;
}

// Coherence of Dupire and Frechet derivatives.
CriterionResult coherence(const Manifest& m, CriterionResult r) {
  const auto ids = core_catalog_ids();
  const CoherenceSweep core = sweep_coherence(m, ids, m.seed + 3);
  r.pass = core.errors == 0 && core.worst <= 1e-3;
  r.detail = "max_abs_gap " + g3(core.worst) + " (1e-3) on " + core.worst_id + " over " +
             std::to_string(ids.size()) + " functionals x " + std::to_string(m.random_paths) + " paths";
  if (core.errors > 0) r.detail += "; " + std::to_string(core.errors) + " errors, first: " + core.first_error;

  // Informational: the remaining registry variants.  Running integrals of
  // nonlinear g need slowly varying paths for the ramp limit at k <= 64.
  const auto extra = extended_registry();
  const CoherenceSweep ext = sweep_coherence(m, extra, m.seed + 3);
  r.detail += "; info: other registry ids max gap " + g3(ext.worst) + " (" + ext.worst_id + "), " +
              std::to_string(ext.errors) + " ramp diagnostics";
  return r;
}

// Generator identity on the functional x model matrix.
CriterionResult generator_matrix(const Manifest& m, CriterionResult r, int workers) {
  double worst_rhs = 0.0, worst_det = 0.0, worst_z = 0.0;
  int failed = 0;
  std::ostringstream bad;
  std::uint64_t cell = 0;
  for (const auto& fid : m.generator_functionals) {
    const Functional f = make_functional(fid);
    for (const auto& mid : m.generator_models) {
      ++cell;
      const SfdeModel model = make_model(mid);
      const bool det = diffusion_free(model, smooth_initial(TimeGrid(m.horizon, 16), m.generator_t));
      const TimeGrid grid(m.horizon, det ? m.generator_deterministic_n : m.generator_stochastic_n);
      const StoppedPath p = smooth_initial(grid, m.generator_t);
      const FdConfig cfg = richardson_time(grid);
      const double rhs_d = generator_rhs_dupire(f, model, p, cfg);
      const double rhs_f = generator_rhs_frechet(f, model, p, RampFamily{m.ramps}, std::nullopt, cfg);
      const double rgap = std::abs(rhs_d - rhs_f) / (1.0 + std::abs(rhs_d));
      worst_rhs = std::max(worst_rhs, rgap);
      const NoisePlan plan{m.seed + 40 + cell, det ? m.generator_deterministic_paths : m.generator_paths, 0};
      const ConvergenceReport lhs =
          generator_lhs(f, model, p, m.generator_epsilons, plan,
                        det ? m.generator_degree_deterministic : m.generator_degree_stochastic, rhs_d,
                        workers);
      const double gap = std::abs(lhs.intercept - rhs_d);
      bool ok = rgap <= 1e-3;
      if (det) {
        worst_det = std::max(worst_det, gap);
        ok = ok && gap <= 1e-6;
      } else {
        const double z = lhs.intercept_std_error > 0.0 ? gap / lhs.intercept_std_error : INFINITY;
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 3.0;
      }
      if (!ok) {
        ++failed;
        bad << ' ' << fid << '/' << mid;
      }
    }
  }
  r.pass = failed == 0;
  r.detail = std::to_string(cell) + " cells; max rhs gap " + g3(worst_rhs) +
             " (1e-3 rel), max stochastic |lhs-rhs|/stderr " + g3(worst_z) +
             " (3), max deterministic |lhs-rhs| " + g3(worst_det) + " (1e-6)";
  if (failed > 0) r.detail += "; failing:" + bad.str();
  return r;
}

// Closed-form generator anchor.
CriterionResult generator_anchor(const Manifest& m, CriterionResult r, int workers) {
  const TimeGrid grid(m.horizon, m.grid_n);
  const Functional f = make_functional("endpoint:square");
  const SfdeModel bm = make_model("bm");
  const std::vector<double> zero{0.0};
  const StoppedPath p = StoppedPath::constant(grid, zero, grid.index_of(m.generator_t));
  const double rd = generator_rhs_dupire(f, bm, p);
  const double rf = generator_rhs_frechet(f, bm, p, RampFamily{m.ramps});
  const ConvergenceReport lhs =
      generator_lhs(f, bm, p, m.generator_epsilons, NoisePlan{m.seed + 5, m.generator_paths, 0}, 1, 1.0,
                    workers);
  double worst_z = 0.0;
  for (const auto& l : lhs.levels) worst_z = std::max(worst_z, l.error / l.std_error);
  r.pass = std::abs(rd - 1.0) <= 1e-6 && std::abs(rf - 1.0) <= 1e-6 && worst_z <= 3.0;
  r.detail = "rhs dupire " + format_double(rd) + ", frechet " + format_double(rf) +
             " (1 +- 1e-6); max |quotient-1|/stderr " + g3(worst_z) + " (3)";
  return r;
}

// Functional Ito formula.
CriterionResult ito_formula(const Manifest& m, CriterionResult r, int workers) {
  const TimeGrid grid(m.horizon, m.grid_n);
  const Functional sq = make_functional("endpoint:square");
  const SfdeModel model = make_model("linear-pd");
  const std::vector<double> x0{1.0};
  const StoppedPath start = StoppedPath::constant(grid, x0, 0);
  FdConfig wide;
  wide.h_vertical = m.ito_realized_h;
  const NoisePlan plan{m.seed + 6, m.ito_realized_paths, 0};
  std::vector<double> residuals(plan.n_paths);
  parallel_for(
      plan.n_paths,
      [&](std::size_t j) {
        const StoppedPath x =
            euler_solve(model, start, m.horizon, plan.increments(j, grid, 1, 0, grid.steps()));
        residuals[j] = std::abs(ito_residual(sq, x, wide, QvMode::Realized));
      },
      workers);
  const double worst = *std::max_element(residuals.begin(), residuals.end());

  ItoStudyConfig cfg;
  cfg.horizon = m.horizon;
  cfg.mode = QvMode::Dt;
  const ConvergenceReport study = ito_convergence_study(make_functional("endpoint:quartic"), make_model("bm"),
                                                        m.ito_resolutions, NoisePlan{m.seed + 7, m.ito_paths, 0},
                                                        cfg, workers);
  const bool opass = study.fitted_order && *study.fitted_order >= 0.4 && *study.fitted_order <= 0.6;
  r.pass = worst <= 1e-10 && opass;
  r.detail = "max realized residual " + g3(worst) + " (1e-10) over " + std::to_string(plan.n_paths) +
             " paths; dt-mode order " + (study.fitted_order ? g3(*study.fitted_order) : "n/a") +
             " [0.4, 0.6]";
  return r;
}

// Strong convergence and determinism of the solver.
CriterionResult sfde_solver(const Manifest& m, CriterionResult r, int workers) {
  const SfdeModel model = make_model("linear-pd");
  const NoisePlan plan{m.seed + 8, m.sfde_paths, m.sfde_reference_n};
  const std::vector<double> x0{m.sfde_x0};
  const std::size_t nres = m.sfde_resolutions.size();
  std::vector<double> sq(plan.n_paths * nres);
  parallel_for(
      plan.n_paths,
      [&](std::size_t j) {
        auto terminal = [&](int n) {
          const TimeGrid grid(m.horizon, n);
          const StoppedPath x = euler_solve(model, StoppedPath::constant(grid, x0, 0), m.horizon,
                                            plan.increments(j, grid, 1, 0, n));
          return x.endpoint();
        };
        const double ref = terminal(m.sfde_reference_n);
        for (std::size_t l = 0; l < nres; ++l) {
          const double d = terminal(m.sfde_resolutions[l]) - ref;
          sq[j * nres + l] = d * d;
        }
      },
      workers);
  std::vector<double> lx, ly, column(plan.n_paths);
  std::ostringstream errs;
  for (std::size_t l = 0; l < nres; ++l) {
    for (std::size_t j = 0; j < plan.n_paths; ++j) column[j] = sq[j * nres + l];
    const double rms = std::sqrt(sample_stats(column).mean);
    lx.push_back(std::log2(m.horizon / m.sfde_resolutions[l]));
    ly.push_back(std::log2(rms));
    errs << (l ? ", " : "") << g3(rms);
  }
  const double slope = fit_line(lx, ly).slope;

  // Same seed, one worker versus three.
  const TimeGrid grid(m.horizon, m.sfde_resolutions.front());
  const StoppedPath start = StoppedPath::constant(grid, x0, 0);
  const NoisePlan small{m.seed + 9, 64, 0};
  std::ostringstream a, b;
  write_ensemble_csv(a, simulate_ensemble(model, start, m.horizon, small, 1));
  write_ensemble_csv(b, simulate_ensemble(model, start, m.horizon, small, 3));
  const Functional f = make_functional("endpoint:square");
  const McEstimate e1 = mc_expectation(f, model, start, m.horizon, small, 1);
  const McEstimate e3 = mc_expectation(f, model, start, m.horizon, small, 3);
  const bool same = a.str() == b.str() && e1.mean == e3.mean && e1.std_error == e3.std_error;

  r.pass = slope >= 0.35 && slope <= 0.65 && same;
  r.detail = "strong-error slope " + g3(slope) + " [0.35, 0.65] (rms " + errs.str() + "); 1 vs 3 workers " +
             (same ? "byte-identical" : "DIFFER");
  return r;
}

double riesz_l1(const Manifest& m, int n) {
  const TimeGrid grid(m.horizon, n);
  const Functional f = make_functional("weighted:linear");
  const StoppedPath p = random_continuous_path(grid, 1, grid.steps(), m.seed + 10, 0);
  const RieszRepresentation est = estimate_riesz_measure(f, p, RampFamily{m.ramps}).representation;
  // Masses of the hats against w(s) = s under the left-point rule.
  const double dt = grid.dt();
  const double t = grid.time(grid.steps());
  double err = 0.0, total = 0.0;
  for (int i = 0; i <= grid.steps(); ++i) {
    double exact = grid.time(i) * dt;
    if (i == 0) exact = dt * dt / 6.0;
    if (i == grid.steps()) exact = dt * (t / 2.0 - dt / 6.0);
    err += std::abs(est.weights(i, 0) - exact);
    total += std::abs(exact);
  }
  err += std::abs(est.atom(0));
  return err / total;
}

// Riesz measure recovery.
CriterionResult riesz_recovery(const Manifest& m, CriterionResult r) {
  const double e1 = riesz_l1(m, m.riesz_n);
  const double e2 = riesz_l1(m, 2 * m.riesz_n);
  const double ratio = e2 / e1;

  const TimeGrid grid(m.horizon, m.riesz_n);
  const Functional sq = make_functional("endpoint:square");
  double atom_err = 0.0;
  for (int s = 0; s < m.random_paths; ++s) {
    const StoppedPath p = sample_path(grid, m.seed + 11, s);
    const double atom = estimate_riesz_measure(sq, p, RampFamily{m.ramps}).representation.atom(0);
    atom_err = std::max(atom_err, std::abs(atom - 2.0 * p.endpoint()));
  }
  r.pass = e1 <= 0.02 && ratio >= 0.4 && ratio <= 0.6 && atom_err <= 1e-4;
  r.detail = "relative L1 " + g3(e1) + " at N=" + std::to_string(m.riesz_n) + " (0.02), ratio " + g3(ratio) +
             " under N->2N [0.4, 0.6]; endpoint:square atom error " + g3(atom_err) + " (1e-4)";
  return r;
}

}  // namespace

AcceptanceManifest AcceptanceManifest::from(const ConfigMap& map) {
  AcceptanceManifest m;
  m.seed = static_cast<std::uint64_t>(map.get_int("seed", static_cast<long long>(m.seed)));
  m.grid_n = static_cast<int>(map.get_int("n", m.grid_n));
  m.horizon = map.get_double("horizon", m.horizon);
  m.random_paths = static_cast<int>(map.get_int("random_paths", m.random_paths));
  m.ramps = map.get_int_list("ramps", m.ramps);
  m.fd_vertical_h = map.get_double("fd_vertical_h", m.fd_vertical_h);
  m.fd_endpoint = map.get_double("fd_endpoint", m.fd_endpoint);
  m.fd_horizontal_steps = static_cast<int>(map.get_int("fd_horizontal_steps", m.fd_horizontal_steps));
  m.generator_functionals = map.get_list("generator_functionals", m.generator_functionals);
  m.generator_models = map.get_list("generator_models", m.generator_models);
  m.generator_epsilons = map.get_double_list("generator_epsilons", m.generator_epsilons);
  m.generator_paths = static_cast<std::size_t>(map.get_int("generator_paths", static_cast<long long>(m.generator_paths)));
  m.generator_deterministic_paths = static_cast<std::size_t>(
      map.get_int("generator_deterministic_paths", static_cast<long long>(m.generator_deterministic_paths)));
  m.generator_stochastic_n = static_cast<int>(map.get_int("generator_stochastic_n", m.generator_stochastic_n));
  m.generator_deterministic_n =
      static_cast<int>(map.get_int("generator_deterministic_n", m.generator_deterministic_n));
  m.generator_degree_stochastic =
      static_cast<int>(map.get_int("generator_degree_stochastic", m.generator_degree_stochastic));
  m.generator_degree_deterministic =
      static_cast<int>(map.get_int("generator_degree_deterministic", m.generator_degree_deterministic));
  m.generator_t = map.get_double("generator_t", m.generator_t);
  m.ito_realized_paths =
      static_cast<std::size_t>(map.get_int("ito_realized_paths", static_cast<long long>(m.ito_realized_paths)));
  m.ito_realized_h = map.get_double("ito_realized_h", m.ito_realized_h);
  m.ito_resolutions = map.get_int_list("ito_resolutions", m.ito_resolutions);
  m.ito_paths = static_cast<std::size_t>(map.get_int("ito_paths", static_cast<long long>(m.ito_paths)));
  m.sfde_resolutions = map.get_int_list("sfde_resolutions", m.sfde_resolutions);
  m.sfde_reference_n = static_cast<int>(map.get_int("sfde_reference_n", m.sfde_reference_n));
  m.sfde_paths = static_cast<std::size_t>(map.get_int("sfde_paths", static_cast<long long>(m.sfde_paths)));
  m.sfde_x0 = map.get_double("sfde_x0", m.sfde_x0);
  m.riesz_n = static_cast<int>(map.get_int("riesz_n", m.riesz_n));
  for (const auto& id : m.generator_functionals) make_functional(id);
  for (const auto& id : m.generator_models) make_model(id);
  return m;
}

const std::vector<CriterionInfo>& acceptance_criteria() {
  static const std::vector<CriterionInfo> list{
      {1, "catalog-derivative-accuracy"}, {2, "fd-order-checks"},     {3, "coherence"},
      {4, "generator-identity"},          {5, "generator-anchor"},    {6, "functional-ito-formula"},
      {7, "sfde-solver"},                 {8, "riesz-recovery"},
  };
  return list;
}

CriterionResult run_criterion(int id, const AcceptanceManifest& manifest, int workers) {
  const auto& list = acceptance_criteria();
  const auto it = std::find_if(list.begin(), list.end(), [id](const CriterionInfo& c) { return c.id == id; });
  if (it == list.end()) throw UsageError("unknown acceptance criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.name = it->name;
  static const double limits[] = {0, 10, 5, 60, 0, 0, 180, 120, 10};
  r.limit_seconds = limits[id];

  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: r = catalog_accuracy(manifest, r); break;
      case 2: r = fd_orders(manifest, r); break;
      case 3: r = coherence(manifest, r); break;
      case 4: r = generator_matrix(manifest, r, workers); break;
      case 5: r = generator_anchor(manifest, r, workers); break;
      case 6: r = ito_formula(manifest, r, workers); break;
      case 7: r = sfde_solver(manifest, r, workers); break;
      case 8: r = riesz_recovery(manifest, r); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.limit_seconds > 0.0 && r.seconds > r.limit_seconds) {
    r.pass = false;
    r.detail += "; runtime over " + g3(r.limit_seconds) + " s";
  }
  return r;
}

std::string format_result(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
  return std::string(r.pass ? "PASS" : "FAIL") + "  " + std::to_string(r.id) + " " + r.name + "  " + r.detail +
         "  (" + secs + " s)";
}

std::vector<CriterionResult> run_acceptance(const AcceptanceManifest& manifest, const std::vector<int>& which,
                                            std::ostream& log, int workers) {
  std::vector<int> ids = which;
  if (ids.empty())
    for (const auto& c : acceptance_criteria()) ids.push_back(c.id);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, manifest, workers));
    log << format_result(out.back()) << std::endl;
  }
  return out;
}

}  // namespace pathcalc
