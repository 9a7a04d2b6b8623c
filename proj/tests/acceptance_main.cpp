// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 iff all pass.

#include <iostream>

#include <CLI11.hpp>

#include "pathcalc/acceptance.hpp"
#include "pathcalc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pathcalc acceptance suite"};
  std::string manifest_file;
  std::vector<int> criteria;
  app.add_option("--manifest", manifest_file, "manifest file")->required();
  app.add_option("--criterion", criteria, "criterion ids to run (default: all)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto manifest = pathcalc::AcceptanceManifest::from(pathcalc::ConfigMap::load(manifest_file));
    const auto results = pathcalc::run_acceptance(manifest, criteria, std::cout);
    for (const auto& r : results)
      if (!r.pass) return 1;
    return 0;
  } catch (const pathcalc::Error& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 2;
  }
}
