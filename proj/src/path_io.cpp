#include "pathcalc/path_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pathcalc/errors.hpp"
#include "pathcalc/report.hpp"

namespace pathcalc {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& source, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError(source + ":" + std::to_string(line) + ": not a number: '" + s + "'");
}

}  // namespace

std::filesystem::path sidecar_of(const std::filesystem::path& file) {
  return std::filesystem::path(file.string() + ".json");
}

StoppedPath parse_path_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(source + ": empty path file");
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "t") throw IoError(source + ": header must be t,x_1,...,x_d");
  const int dim = static_cast<int>(header.size()) - 1;

  std::vector<double> times;
  std::vector<double> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (static_cast<int>(fields.size()) != dim + 1)
      throw IoError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim + 1) +
                    " columns");
    times.push_back(parse_number(fields[0], source, lineno));
    for (int j = 0; j < dim; ++j) values.push_back(parse_number(fields[j + 1], source, lineno));
  }
  if (times.size() < 2) throw IoError(source + ": a path needs at least two nodes");
  const int steps = static_cast<int>(times.size()) - 1;
  const double horizon = times.back();
  if (std::abs(times.front()) > 1e-12 || !(horizon > 0.0))
    throw GridAlignmentError(source + ": times must run from 0 to T > 0");
  const TimeGrid grid(horizon, steps);
  for (int i = 0; i <= steps; ++i) {
    if (std::abs(times[i] - grid.time(i)) > 1e-9 * horizon)
      throw GridAlignmentError(source + ": times are not a uniform grid");
  }
  return StoppedPath::from_samples(grid, dim, std::move(values), steps);
}

StoppedPath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open path file '" + file.string() + "'");
  StoppedPath p = parse_path_csv(in, file.string());

  const auto side = sidecar_of(file);
  if (!std::filesystem::exists(side)) return p;
  std::ifstream sin(side);
  nlohmann::json meta;
  try {
    sin >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad sidecar '" + side.string() + "': " + e.what());
  }
  if (meta.contains("stop_index")) p = stop_at_index(p, meta.at("stop_index").get<int>());
  if (meta.contains("bump")) {
    const auto bump = meta.at("bump").get<std::vector<double>>();
    if (static_cast<int>(bump.size()) != p.dim()) throw IoError("sidecar bump has the wrong dimension");
    p = vertical_bump(p, bump);
  }
  return p;
}

void write_path_csv(const std::filesystem::path& file, const StoppedPath& p) {
  std::ostringstream os;
  os << 't';
  for (int j = 0; j < p.dim(); ++j) os << ",x_" << j + 1;
  os << '\n';
  for (int i = 0; i < p.grid().node_count(); ++i) {
    os << format_double(p.grid().time(i));
    for (int j = 0; j < p.dim(); ++j) os << ',' << format_double(p.sample(i, j));
    os << '\n';
  }
  write_text_file(file, os.str());

  Json meta;
  meta["stop_index"] = p.stop_index();
  Json bump = Json::array();
  for (double b : p.bump()) bump.push_back(b);
  meta["bump"] = std::move(bump);
  write_text_file(sidecar_of(file), dump_json(meta) + "\n");
}

void write_ensemble_csv(std::ostream& os, const std::vector<StoppedPath>& paths) {
  const int dim = paths.empty() ? 1 : paths.front().dim();
  os << "path,t";
  for (int j = 0; j < dim; ++j) os << ",x_" << j + 1;
  os << '\n';
  for (std::size_t n = 0; n < paths.size(); ++n) {
    const StoppedPath& p = paths[n];
    for (int i = 0; i <= p.stop_index(); ++i) {
      os << n << ',' << format_double(p.grid().time(i));
      for (int j = 0; j < dim; ++j) os << ',' << format_double(p.value(i, j));
      os << '\n';
    }
  }
}

}  // namespace pathcalc
