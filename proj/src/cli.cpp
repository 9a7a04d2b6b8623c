#include "pathcalc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pathcalc/acceptance.hpp"
#include "pathcalc/catalog.hpp"
#include "pathcalc/config.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/path_io.hpp"
#include "pathcalc/report.hpp"
#include "pathcalc/verify.hpp"

namespace pathcalc {

namespace {

namespace fs = std::filesystem;

// Flags shared by every subcommand.  Each one, when given, overrides the
// config key of the same name.
struct Common {
  std::string config;
  std::map<std::string, std::string> flags;
};

void bind(CLI::App* app, Common& c, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      "--" + flag, [&c, key](const std::string& v) { c.flags[key] = v; }, help);
}

ConfigMap resolve(const Common& c) {
  ConfigMap map = c.config.empty() ? ConfigMap{} : ConfigMap::load(c.config);
  for (const auto& [k, v] : c.flags) map.set(k, v);
  return map;
}

std::uint64_t require_seed(const ConfigMap& map) {
  if (!map.contains("seed")) throw UsageError("a seed is required (--seed or 'seed' in the config)");
  const long long s = map.get_int("seed", 0);
  if (s < 0) throw UsageError("seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

FdConfig fd_config(const ConfigMap& map) {
  FdConfig cfg;
  if (map.contains("h_vertical")) cfg.h_vertical = map.get_double("h_vertical", 0.0);
  if (map.contains("eps_horizontal")) cfg.eps_horizontal = map.get_double("eps_horizontal", 0.0);
  cfg.richardson_levels = static_cast<int>(map.get_int("richardson_levels", 1));
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

RampFamily ramps_of(const ConfigMap& map) { return RampFamily{map.get_int_list("ramps", RampFamily{}.k_values)}; }

Functional functional_of(const ConfigMap& map) {
  const auto ids = map.get_list("functionals");
  if (ids.empty()) throw UsageError("missing --functional");
  return make_functional(ids.front());
}

SfdeModel model_of(const ConfigMap& map) {
  const auto ids = map.get_list("models");
  if (ids.empty()) throw UsageError("missing --model");
  return make_model(ids.front());
}

// Path from --path (optionally stopped at --t), else a constant path at x0
// on the configured grid stopped at t.
StoppedPath path_of(const ConfigMap& map, const std::string& t_key = "t") {
  if (auto file = map.get("path")) {
    StoppedPath p = read_path_csv(*file);
    if (map.contains(t_key)) p = stop_at(p, map.get_double(t_key, 0.0));
    return p;
  }
  const TimeGrid grid(map.get_double("horizon", 1.0), static_cast<int>(map.get_int("n", 256)));
  const std::vector<double> x0{map.get_double("x0", 0.0)};
  return StoppedPath::constant(grid, x0, grid.index_of(map.get_double(t_key, 0.0)));
}

fs::path out_dir(const ConfigMap& map) { return map.get_string("out", ""); }

void write_json_report(const ConfigMap& map, const std::string& name, const Json& j, std::ostream& out) {
  const std::string text = dump_json(j);
  out << text << '\n';
  const fs::path dir = out_dir(map);
  if (!dir.empty()) write_text_file(dir / (name + ".json"), text + "\n");
}

int cmd_derive(const ConfigMap& map, std::ostream& out) {
  const Functional f = functional_of(map);
  const StoppedPath p = path_of(map);
  const DupireJet jet = numerical_dupire_jet(f, p, fd_config(map));
  Json j;
  j["functional"] = f.name();
  j["t"] = p.stop_time();
  j["jet"] = to_json(jet);
  if (f.has_analytic_jet()) j["analytic"] = to_json(f.analytic_jet(p));
  write_json_report(map, "derive", j, out);
  return kExitPass;
}

int cmd_frechet(const ConfigMap& map, std::ostream& out) {
  const Functional f = functional_of(map);
  const StoppedPath p = path_of(map);
  std::optional<double> h;
  if (map.contains("h_directional")) h = map.get_double("h_directional", 0.0);
  const RieszEstimate est = estimate_riesz_measure(f, p, ramps_of(map), h);
  Json j;
  j["functional"] = f.name();
  j["representation"] = to_json(est.representation);
  Json trace = Json::array();
  for (const auto& e : est.ramp_trace) trace.push_back({{"coord", e.coord}, {"k", e.k}, {"value", e.value}});
  j["ramp_trace"] = std::move(trace);
  write_json_report(map, "frechet", j, out);
  return kExitPass;
}

int cmd_sfde_sim(const ConfigMap& map, std::ostream& out) {
  const SfdeModel model = model_of(map);
  const StoppedPath initial = path_of(map, "t0");
  const double until = map.get_double("until", initial.grid().horizon());
  const NoisePlan plan{require_seed(map), static_cast<std::size_t>(map.get_int("paths", 1)), 0};
  if (plan.n_paths < 1) throw UsageError("--paths must be >= 1");
  const auto paths = simulate_ensemble(model, initial, until, plan);
  std::ostringstream csv;
  write_ensemble_csv(csv, paths);
  if (auto file = map.get("csv")) {
    write_text_file(*file, csv.str());
  } else if (!out_dir(map).empty()) {
    write_text_file(out_dir(map) / "ensemble.csv", csv.str());
  } else {
    out << csv.str();
  }
  return kExitPass;
}

int cmd_verify_ito(const ConfigMap& map, std::ostream& out) {
  const Functional f = functional_of(map);
  const SfdeModel model = model_of(map);
  ItoStudyConfig cfg;
  cfg.horizon = map.get_double("horizon", 1.0);
  cfg.x0 = map.get_double("x0", 0.0);
  const std::string qv = map.get_string("qv", "dt");
  if (qv == "realized") {
    cfg.mode = QvMode::Realized;
  } else if (qv == "dt") {
    cfg.mode = QvMode::Dt;
  } else {
    throw UsageError("--qv must be 'realized' or 'dt'");
  }
  cfg.fd = fd_config(map);
  const auto resolutions = map.get_int_list("resolutions", {256, 1024, 4096});
  const NoisePlan plan{require_seed(map), static_cast<std::size_t>(map.get_int("paths", 1000)), 0};
  const ConvergenceReport report = ito_convergence_study(f, model, resolutions, plan, cfg);

  const double tol = map.get_double("tol", 1e-10);
  const double lo = map.get_double("order_min", 0.4);
  const double hi = map.get_double("order_max", 0.6);
  bool pass = false;
  if (report.fitted_order) {
    pass = *report.fitted_order >= lo && *report.fitted_order <= hi;
  } else {
    pass = std::all_of(report.levels.begin(), report.levels.end(),
                       [tol](const ConvergenceLevel& l) { return l.error <= tol; });
  }
  if (!out_dir(map).empty()) emit_report(report, ReportFormat::Csv, out_dir(map) / "verify-ito.csv");
  Json j;
  j["fitted_order"] = report.fitted_order ? Json(*report.fitted_order) : Json(nullptr);
  j["pass"] = pass;
  write_json_report(map, "verify-ito", j, out);
  return pass ? kExitPass : kExitFail;
}

int cmd_verify_generator(const ConfigMap& map, std::ostream& out) {
  const Functional f = functional_of(map);
  const SfdeModel model = model_of(map);
  const StoppedPath p = path_of(map);
  const FdConfig cfg = fd_config(map);
  const RampFamily ramps = ramps_of(map);
  const double rhs_d = generator_rhs_dupire(f, model, p, cfg);
  const double rhs_f = generator_rhs_frechet(f, model, p, ramps, std::nullopt, cfg);
  const auto eps = map.get_double_list("epsilons", {0.0625, 0.03125, 0.015625, 0.0078125});
  const NoisePlan plan{require_seed(map), static_cast<std::size_t>(map.get_int("paths", 10000)), 0};
  const int degree = static_cast<int>(map.get_int("degree", 1));
  const ConvergenceReport lhs = generator_lhs(f, model, p, eps, plan, degree, rhs_d);

  const bool rhs_ok = std::abs(rhs_d - rhs_f) <= 1e-3 * (1.0 + std::abs(rhs_d));
  const double gap = std::abs(lhs.intercept - rhs_d);
  const bool lhs_ok = lhs.intercept_std_error > 0.0 ? gap <= 3.0 * lhs.intercept_std_error : gap <= 1e-6;
  const bool pass = rhs_ok && lhs_ok;
  if (!out_dir(map).empty()) emit_report(lhs, ReportFormat::Csv, out_dir(map) / "verify-generator.csv");
  Json j;
  j["rhs_dupire"] = rhs_d;
  j["rhs_frechet"] = rhs_f;
  j["intercept"] = lhs.intercept;
  j["intercept_stderr"] = lhs.intercept_std_error;
  j["pass"] = pass;
  write_json_report(map, "verify-generator", j, out);
  return pass ? kExitPass : kExitFail;
}

int cmd_coherence(const ConfigMap& map, std::ostream& out) {
  const Functional f = functional_of(map);
  const StoppedPath p = path_of(map);
  const CoherenceReport report = coherence_report(f, p, fd_config(map), ramps_of(map));
  const bool pass = report.max_abs_gap <= map.get_double("tol", 1e-3);
  if (!out_dir(map).empty()) emit_report(report, ReportFormat::Csv, out_dir(map) / "coherence.csv");
  Json j = to_json(report);
  const Json gap = j["max_abs_gap"];
  j.erase("max_abs_gap");
  j["pass"] = pass;
  j["max_abs_gap"] = gap;
  write_json_report(map, "coherence", j, out);
  return pass ? kExitPass : kExitFail;
}

int cmd_accept(const ConfigMap& map, const std::vector<int>& criteria, std::ostream& out) {
  const auto manifest_file = map.get("manifest");
  ConfigMap manifest_map = manifest_file ? ConfigMap::load(*manifest_file) : ConfigMap{};
  for (const auto& [k, v] : map.entries())
    if (k != "manifest" && k != "out") manifest_map.set(k, v);
  const AcceptanceManifest manifest = AcceptanceManifest::from(manifest_map);
  const auto results = run_acceptance(manifest, criteria, out);
  bool pass = true;
  Json list = Json::array();
  for (const auto& r : results) {
    pass = pass && r.pass;
    list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  if (!out_dir(map).empty()) {
    Json j;
    j["criteria"] = std::move(list);
    j["pass"] = pass;
    write_text_file(out_dir(map) / "acceptance.json", dump_json(j) + "\n");
  }
  return pass ? kExitPass : kExitFail;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical functional Ito calculus toolkit", "pathcalc"};
  // `--h` is a step flag, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Common common;
  std::vector<int> criteria;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config, "flat key = value config file");
    return sub;
  };
  auto grid_flags = [&](CLI::App* sub) {
    bind(sub, common, "n", "n", "grid steps");
    bind(sub, common, "horizon", "horizon", "time horizon T");
    bind(sub, common, "x0", "x0", "constant initial path value (when --path is absent)");
    bind(sub, common, "out", "out", "report directory");
  };
  auto fd_flags = [&](CLI::App* sub) {
    bind(sub, common, "h,--h-vertical", "h_vertical", "vertical bump size");
    bind(sub, common, "eps,--eps-horizontal", "eps_horizontal", "horizontal extension step");
    bind(sub, common, "richardson", "richardson_levels", "Richardson levels (1-3)");
  };

  CLI::App* derive = add("derive", "Dupire jet of a functional at a stopped path");
  bind(derive, common, "functional", "functionals", "functional id");
  bind(derive, common, "path", "path", "path CSV");
  bind(derive, common, "t", "t", "stop time");
  grid_flags(derive);
  fd_flags(derive);

  CLI::App* frechet = add("frechet", "Riesz measure of the Frechet derivative");
  bind(frechet, common, "functional", "functionals", "functional id");
  bind(frechet, common, "path", "path", "path CSV");
  bind(frechet, common, "t", "t", "stop time");
  bind(frechet, common, "ramps", "ramps", "ramp k values, comma separated");
  bind(frechet, common, "h-directional", "h_directional", "directional step");
  grid_flags(frechet);

  CLI::App* sim = add("sfde-sim", "Euler-Maruyama ensemble");
  bind(sim, common, "model", "models", "model id");
  bind(sim, common, "path", "path", "initial path CSV");
  bind(sim, common, "t0", "t0", "initial stop time");
  bind(sim, common, "until", "until", "final time");
  bind(sim, common, "paths", "paths", "number of paths");
  bind(sim, common, "seed", "seed", "random seed (required)");
  bind(sim, common, "n", "n", "grid steps");
  bind(sim, common, "horizon", "horizon", "time horizon T");
  bind(sim, common, "x0", "x0", "constant initial path value");
  bind(sim, common, "out", "csv", "ensemble CSV file");

  CLI::App* ito = add("verify-ito", "Functional Ito formula residual study");
  bind(ito, common, "functional", "functionals", "functional id");
  bind(ito, common, "model", "models", "model id");
  bind(ito, common, "resolutions", "resolutions", "grid sizes, comma separated powers of two");
  bind(ito, common, "paths", "paths", "number of paths");
  bind(ito, common, "seed", "seed", "random seed (required)");
  bind(ito, common, "qv", "qv", "quadratic variation: realized or dt");
  bind(ito, common, "tol", "tol", "residual tolerance when no order is measurable");
  bind(ito, common, "order-min", "order_min", "lowest accepted order");
  bind(ito, common, "order-max", "order_max", "highest accepted order");
  bind(ito, common, "horizon", "horizon", "time horizon T");
  bind(ito, common, "x0", "x0", "initial value");
  bind(ito, common, "out", "out", "report directory");
  fd_flags(ito);

  CLI::App* gen = add("verify-generator", "Generator identity at a stopped path");
  bind(gen, common, "functional", "functionals", "functional id");
  bind(gen, common, "model", "models", "model id");
  bind(gen, common, "path", "path", "path CSV");
  bind(gen, common, "t", "t", "stop time");
  bind(gen, common, "epsilons", "epsilons", "decreasing epsilons, comma separated");
  bind(gen, common, "paths", "paths", "paths per epsilon");
  bind(gen, common, "seed", "seed", "random seed (required)");
  bind(gen, common, "degree", "degree", "extrapolation degree in epsilon");
  bind(gen, common, "ramps", "ramps", "ramp k values");
  grid_flags(gen);
  fd_flags(gen);

  CLI::App* coh = add("coherence", "Dupire versus Frechet derivatives at a stopped path");
  bind(coh, common, "functional", "functionals", "functional id");
  bind(coh, common, "path", "path", "path CSV");
  bind(coh, common, "t", "t", "stop time");
  bind(coh, common, "ramps", "ramps", "ramp k values");
  bind(coh, common, "tol", "tol", "gap tolerance");
  grid_flags(coh);
  fd_flags(coh);

  CLI::App* accept = add("accept", "Run the acceptance suite");
  bind(accept, common, "manifest", "manifest", "manifest file");
  bind(accept, common, "seed", "seed", "override the manifest seed");
  bind(accept, common, "out", "out", "report directory");
  accept->add_option("--criterion", criteria, "criterion ids (default: all)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "pathcalc: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const ConfigMap map = resolve(common);
    if (derive->parsed()) return cmd_derive(map, out);
    if (frechet->parsed()) return cmd_frechet(map, out);
    if (sim->parsed()) return cmd_sfde_sim(map, out);
    if (ito->parsed()) return cmd_verify_ito(map, out);
    if (gen->parsed()) return cmd_verify_generator(map, out);
    if (coh->parsed()) return cmd_coherence(map, out);
    if (accept->parsed()) return cmd_accept(map, criteria, out);
  } catch (const UsageError& e) {
    err << "pathcalc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "pathcalc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GridAlignmentError& e) {
    err << "pathcalc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "pathcalc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "pathcalc: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace pathcalc
