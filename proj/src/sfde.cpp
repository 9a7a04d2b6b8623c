#include "pathcalc/sfde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "pathcalc/errors.hpp"
#include "pathcalc/rng.hpp"

namespace pathcalc {

namespace {

Eigen::VectorXd constant_vector(double v) { return Eigen::VectorXd::Constant(1, v); }
Eigen::MatrixXd constant_matrix(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

struct Coefficients {
  Eigen::VectorXd drift;
  Eigen::MatrixXd diffusion;
};

Coefficients evaluate_coefficients(const SfdeModel& model, double t, const StoppedPath& view) {
  Coefficients c{model.drift(t, view), model.diffusion(t, view)};
  if (c.drift.size() != model.state_dim)
    throw DomainError("model '" + model.name + "': drift has wrong dimension");
  if (c.diffusion.rows() != model.state_dim || c.diffusion.cols() != model.noise_dim)
    throw DomainError("model '" + model.name + "': diffusion has wrong shape");
  return c;
}

std::string at_time(double t) {
  std::ostringstream os;
  os << " at t = " << t;
  return os.str();
}

void validate_model(const SfdeModel& model, const StoppedPath& initial) {
  if (!model.drift || !model.diffusion) throw UsageError("model '" + model.name + "' has no coefficients");
  if (model.state_dim != initial.dim())
    throw DomainError("model '" + model.name + "': initial path has the wrong dimension");
  if (model.noise_dim < 1) throw DomainError("model '" + model.name + "': noise dimension must be >= 1");
}

}  // namespace

SfdeModel make_model(const std::string& id, double clip) {
  SfdeModel m;
  m.name = id;
  if (id == "zero") {
    m.drift = [](double, const StoppedPath&) { return constant_vector(0.0); };
    m.diffusion = [](double, const StoppedPath&) { return constant_matrix(0.0); };
    m.lipschitz_c = 0.0;
    m.bound_K = 0.0;
  } else if (id == "drift1") {
    m.drift = [](double, const StoppedPath&) { return constant_vector(1.0); };
    m.diffusion = [](double, const StoppedPath&) { return constant_matrix(0.0); };
    m.lipschitz_c = 0.0;
    m.bound_K = 1.0;
  } else if (id == "bm") {
    m.drift = [](double, const StoppedPath&) { return constant_vector(0.0); };
    m.diffusion = [](double, const StoppedPath&) { return constant_matrix(1.0); };
    m.lipschitz_c = 0.0;
    m.bound_K = 1.0;
  } else if (id == "linear-pd") {
    if (!(clip > 0.0)) throw DomainError("linear-pd: clip radius must be > 0");
    // b = clip(int_0^s X), sigma = clip(X(s)); Lipschitz constant 1 + s <= 2 on [0, 1].
    m.drift = [clip](double, const StoppedPath& x) {
      return constant_vector(std::clamp(x.left_integral(), -clip, clip));
    };
    m.diffusion = [clip](double, const StoppedPath& x) {
      return constant_matrix(std::clamp(x.endpoint(), -clip, clip));
    };
    m.lipschitz_c = 2.0;
    m.bound_K = 2.0 * clip;
  } else if (id == "tanh-pd") {
    m.drift = [](double, const StoppedPath& x) { return constant_vector(std::tanh(x.left_integral())); };
    m.diffusion = [](double, const StoppedPath&) { return constant_matrix(1.0); };
    m.lipschitz_c = 1.0;
    m.bound_K = 2.0;
  } else {
    std::ostringstream os;
    os << "unknown model '" << id << "'; known:";
    for (const auto& k : model_ids()) os << ' ' << k;
    throw UsageError(os.str());
  }
  return m;
}

std::vector<std::string> model_ids() { return {"zero", "drift1", "bm", "linear-pd", "tanh-pd"}; }

std::vector<double> NoisePlan::increments(std::size_t path, const TimeGrid& grid, int noise_dim,
                                          int from, int to) const {
  if (from < 0 || to > grid.steps() || from > to) throw DomainError("noise: step range outside the grid");
  const int fine = fine_steps > 0 ? fine_steps : grid.steps();
  if (fine % grid.steps() != 0)
    throw GridAlignmentError("noise: fine grid does not refine the simulation grid");
  const int ratio = fine / grid.steps();
  const double scale = std::sqrt(grid.horizon() / fine);
  const CounterRng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(to - from) * noise_dim, 0.0);
  for (int i = from; i < to; ++i) {
    for (int c = 0; c < noise_dim; ++c) {
      double sum = 0.0;
      for (int q = 0; q < ratio; ++q) {
        const auto index = (static_cast<std::uint64_t>(i) * ratio + q) * noise_dim + c;
        sum += scale * rng.normal(path, index);
      }
      out[static_cast<std::size_t>(i - from) * noise_dim + c] = sum;
    }
  }
  return out;
}

StoppedPath euler_solve(const SfdeModel& model, const StoppedPath& initial, double until,
                        std::span<const double> noise) {
  validate_model(model, initial);
  const TimeGrid& grid = initial.grid();
  const int start = initial.stop_index();
  const int end = grid.index_of(until);
  if (end < start) throw DomainError("euler_solve: target time precedes the initial stop time");
  const int n = model.state_dim;
  const int m = model.noise_dim;
  if (noise.size() != static_cast<std::size_t>(end - start) * m)
    throw DomainError("euler_solve: noise has the wrong length");

  const double dt = grid.dt();
  PathBuilder builder(initial);
  std::vector<double> next(n);
  for (int i = start; i < end; ++i) {
    const double t = grid.time(i);
    Coefficients c = evaluate_coefficients(model, t, builder.view());
    if (!all_finite(c.drift) || !all_finite(c.diffusion)) {
      // The live view leaves unwritten nodes as NaN; a coefficient that
      // reads them is looking ahead.
      const Coefficients retry = evaluate_coefficients(model, t, builder.frozen_view());
      if (all_finite(retry.drift) && all_finite(retry.diffusion))
        throw CausalityError("model '" + model.name + "' reads the path beyond the current time" +
                             at_time(t));
      throw BlowUpError("model '" + model.name + "': non-finite coefficient" + at_time(t));
    }
    const auto row = noise.subspan(static_cast<std::size_t>(i - start) * m, m);
    for (int j = 0; j < n; ++j) {
      double x = builder.at(j) + c.drift(j) * dt;
      for (int q = 0; q < m; ++q) x += c.diffusion(j, q) * row[q];
      if (!std::isfinite(x)) throw BlowUpError("model '" + model.name + "': state blew up" + at_time(t + dt));
      next[j] = x;
    }
    builder.push(next);
  }
  return builder.finish();
}

std::vector<StoppedPath> simulate_ensemble(const SfdeModel& model, const StoppedPath& initial,
                                           double until, const NoisePlan& plan, int workers) {
  validate_model(model, initial);
  const int start = initial.stop_index();
  const int end = initial.grid().index_of(until);
  std::vector<std::optional<StoppedPath>> slots(plan.n_paths);
  parallel_for(
      plan.n_paths,
      [&](std::size_t j) {
        const auto dw = plan.increments(j, initial.grid(), model.noise_dim, start, end);
        const std::string where = " (path " + std::to_string(j) + ")";
        try {
          slots[j] = euler_solve(model, initial, until, dw);
        } catch (const CausalityError& e) {
          throw CausalityError(e.what() + where);
        } catch (const BlowUpError& e) {
          throw BlowUpError(e.what() + where);
        }
      },
      workers);
  std::vector<StoppedPath> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

McEstimate mc_expectation(const Functional& f, const SfdeModel& model, const StoppedPath& initial,
                          double at, const NoisePlan& plan, int workers) {
  validate_model(model, initial);
  if (plan.n_paths == 0) throw DomainError("mc_expectation: need at least one path");
  const int start = initial.stop_index();
  const int end = initial.grid().index_of(at);
  std::vector<double> values(plan.n_paths);
  parallel_for(
      plan.n_paths,
      [&](std::size_t j) {
        const auto dw = plan.increments(j, initial.grid(), model.noise_dim, start, end);
        const double v = evaluate(f, euler_solve(model, initial, at, dw));
        if (!std::isfinite(v)) throw NumericalError("mc_expectation: non-finite functional value");
        values[j] = v;
      },
      workers);
  const SampleStats st = sample_stats(values);
  return {st.mean, st.std_error, st.n};
}

namespace {

double coefficient_size(const Coefficients& c) { return c.drift.norm() + c.diffusion.norm(); }

}  // namespace

AssumptionReport check_lipschitz(const SfdeModel& model, std::size_t samples, std::uint64_t seed,
                                 const SamplingDomain& domain) {
  const TimeGrid& grid = domain.grid;
  const CounterRng rng(seed);
  const double a = domain.amplitude;
  AssumptionReport report;
  report.declared = model.lipschitz_c;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::uint64_t base = 3 * s;
    const double u = rng.uniform(base, 0);
    const int node = std::min(grid.steps(), 1 + static_cast<int>(rng.uniform(base, 1) * grid.steps()));
    const StoppedPath x1 = random_continuous_path(grid, model.state_dim, node, seed, base + 1,
                                                  0.5 * a * rng.uniform(base, 2), a);
    StoppedPath x2 = x1;
    if (u < 0.5) {
      x2 = random_continuous_path(grid, model.state_dim, node, seed, base + 2,
                                  0.5 * a * rng.uniform(base, 3), a);
    } else {
      // Nearby pair: x1 + delta * eta with delta spanning several decades.
      const double delta = std::pow(10.0, -4.0 * rng.uniform(base, 4));
      const StoppedPath eta = random_continuous_path(grid, model.state_dim, node, seed, base + 2);
      x2 = perturb(x1, eta, delta);
    }
    const double distance = d_infinity(x1, x2);
    if (!(distance > 0.0)) continue;
    const double t = grid.time(node);
    const Coefficients c1 = evaluate_coefficients(model, t, x1);
    const Coefficients c2 = evaluate_coefficients(model, t, x2);
    const double gap = (c1.drift - c2.drift).norm() + (c1.diffusion - c2.diffusion).norm();
    report.max_observed = std::max(report.max_observed, gap / distance);
    ++report.samples;
  }
  report.pass = report.max_observed <= report.declared * (1.0 + 1e-9) + 1e-12;
  return report;
}

AssumptionReport check_bounded(const SfdeModel& model, std::size_t samples, std::uint64_t seed,
                               const SamplingDomain& domain) {
  const TimeGrid& grid = domain.grid;
  const CounterRng rng(seed);
  const double a = domain.amplitude;
  AssumptionReport report;
  report.declared = model.bound_K;
  for (std::size_t s = 0; s < samples; ++s) {
    const int node = static_cast<int>(rng.uniform(2 * s, 0) * grid.node_count()) % grid.node_count();
    const StoppedPath x = random_continuous_path(grid, model.state_dim, node, seed, 2 * s + 1,
                                                 0.5 * a * rng.uniform(2 * s, 1), a);
    report.max_observed = std::max(report.max_observed,
                                   coefficient_size(evaluate_coefficients(model, grid.time(node), x)));
    ++report.samples;
  }
  report.pass = report.max_observed <= report.declared * (1.0 + 1e-9) + 1e-12;
  return report;
}

}  // namespace pathcalc
