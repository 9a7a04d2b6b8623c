#include "pathcalc/config.hpp"

#include <fstream>
#include <sstream>

#include "pathcalc/catalog.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/sfde.hpp"

namespace pathcalc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(what + ": expected a number, got '" + text + "'");
}

long long parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(what + ": expected an integer, got '" + text + "'");
}

ConfigMap ConfigMap::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file '" + file.string() + "'");
  return parse(in, file.string());
}

ConfigMap ConfigMap::parse(std::istream& in, const std::string& source) {
  ConfigMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw UsageError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw UsageError(source + ":" + std::to_string(lineno) + ": empty key");
    map.entries_[key] = trim(body.substr(eq + 1));
  }
  return map;
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return unquote(it->second);
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_double(*v, key) : fallback;
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  return v ? parse_int(*v, key) : fallback;
}

std::vector<std::string> ConfigMap::get_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::string raw = it->second;
  if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']') raw = raw.substr(1, raw.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key,
                                               const std::vector<double>& fallback) const {
  if (!contains(key)) return fallback;
  std::vector<double> out;
  for (const auto& s : get_list(key)) out.push_back(parse_double(s, key));
  return out;
}

std::vector<int> ConfigMap::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
  if (!contains(key)) return fallback;
  std::vector<int> out;
  for (const auto& s : get_list(key)) out.push_back(static_cast<int>(parse_int(s, key)));
  return out;
}

RunConfig RunConfig::from(const ConfigMap& map) {
  RunConfig c;
  c.grid_n = static_cast<int>(map.get_int("n", c.grid_n));
  c.horizon = map.get_double("horizon", c.horizon);
  if (map.contains("seed")) c.seed = static_cast<std::uint64_t>(map.get_int("seed", 0));
  c.paths = static_cast<std::size_t>(map.get_int("paths", static_cast<long long>(c.paths)));
  c.functionals = map.get_list("functionals");
  c.models = map.get_list("models");
  if (map.contains("h_vertical")) c.h_vertical = map.get_double("h_vertical", 0.0);
  if (map.contains("eps_horizontal")) c.eps_horizontal = map.get_double("eps_horizontal", 0.0);
  c.richardson_levels = static_cast<int>(map.get_int("richardson_levels", c.richardson_levels));
  c.ramps = map.get_int_list("ramps", c.ramps);
  c.out_dir = map.get_string("out", c.out_dir.string());
  return c;
}

void RunConfig::validate() const {
  if (grid_n < 1) throw UsageError("n must be >= 1");
  if (!(horizon > 0.0)) throw UsageError("horizon must be > 0");
  if (paths < 1) throw UsageError("paths must be >= 1");
  if (richardson_levels < 1 || richardson_levels > 3) throw UsageError("richardson_levels must be 1..3");
  for (const auto& id : functionals) make_functional(id);
  for (const auto& id : models) make_model(id);
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw UsageError("a seed is required (--seed or 'seed' in the config)");
  return *seed;
}

}  // namespace pathcalc
