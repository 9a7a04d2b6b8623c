#pragma once

// Manifest-driven acceptance suite shared by the acceptance test binary and
// the `accept` subcommand.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathcalc/config.hpp"

namespace pathcalc {

struct AcceptanceManifest {
  std::uint64_t seed = 20240601;
  int grid_n = 256;
  double horizon = 1.0;
  int random_paths = 20;
  std::vector<int> ramps{8, 16, 32, 64};

  // Finite-difference order checks.
  double fd_vertical_h = 0.1;
  double fd_endpoint = 0.7;
  int fd_horizontal_steps = 16;

  // Generator matrix.
  std::vector<std::string> generator_functionals{"endpoint:square", "product", "quadratic-integral",
                                                 "endpoint-time:square"};
  std::vector<std::string> generator_models{"drift1", "bm", "tanh-pd"};
  std::vector<double> generator_epsilons{0.0625, 0.03125, 0.015625, 0.0078125};
  std::size_t generator_paths = 100000;
  std::size_t generator_deterministic_paths = 2;
  int generator_stochastic_n = 4096;
  int generator_deterministic_n = 2097152;
  int generator_degree_stochastic = 2;
  int generator_degree_deterministic = 3;
  double generator_t = 0.5;

  // Ito formula.
  std::size_t ito_realized_paths = 200;
  double ito_realized_h = 0.125;
  std::vector<int> ito_resolutions{256, 1024, 4096};
  std::size_t ito_paths = 10000;

  // Strong convergence.
  std::vector<int> sfde_resolutions{128, 256, 512, 1024};
  int sfde_reference_n = 16384;
  std::size_t sfde_paths = 1000;
  double sfde_x0 = 1.0;

  // Riesz recovery.
  int riesz_n = 256;

  static AcceptanceManifest from(const ConfigMap& map);
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0 means no limit
};

struct CriterionInfo {
  int id;
  const char* name;
};
const std::vector<CriterionInfo>& acceptance_criteria();

/// Runs one criterion; exceptions become failed results.
CriterionResult run_criterion(int id, const AcceptanceManifest& manifest, int workers = 0);

/// One line: `PASS|FAIL  <id> <name>  <detail>  (<seconds> s)`.
std::string format_result(const CriterionResult& r);

/// Runs the listed criteria (all when empty), printing each line to `log`
/// as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceManifest& manifest,
                                            const std::vector<int>& which, std::ostream& log,
                                            int workers = 0);

}  // namespace pathcalc
