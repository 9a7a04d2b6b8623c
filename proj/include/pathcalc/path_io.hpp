#pragma once

// Path files: CSV with header `t,x_1,...,x_d`, one row per grid node, and an
// optional sidecar `<file>.json` holding {"stop_index": k, "bump": [...]}.
// Without a sidecar the path is stopped at its last node.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pathcalc/path.hpp"

namespace pathcalc {

StoppedPath read_path_csv(const std::filesystem::path& file);
StoppedPath parse_path_csv(std::istream& in, const std::string& source = "<stream>");

/// Writes all N+1 frozen node samples and the sidecar.
void write_path_csv(const std::filesystem::path& file, const StoppedPath& p);

/// Long format `path,t,x_1,...,x_d` for an ensemble, nodes 0..stop of each.
void write_ensemble_csv(std::ostream& os, const std::vector<StoppedPath>& paths);

std::filesystem::path sidecar_of(const std::filesystem::path& file);

}  // namespace pathcalc
