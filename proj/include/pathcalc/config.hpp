#pragma once

// Flat `key = value` configuration files (a TOML subset without tables).
// Values may be bare, quoted, or bracketed comma-separated lists; `#` starts
// a comment.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pathcalc {

class ConfigMap {
 public:
  static ConfigMap load(const std::filesystem::path& file);
  static ConfigMap parse(std::istream& in, const std::string& source = "<config>");

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback = {}) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback = {}) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback = {}) const;

 private:
  std::map<std::string, std::string> entries_;
};

struct RunConfig {
  int grid_n = 256;
  double horizon = 1.0;
  std::optional<std::uint64_t> seed;
  std::size_t paths = 1000;
  std::vector<std::string> functionals;
  std::vector<std::string> models;
  std::optional<double> h_vertical;
  std::optional<double> eps_horizontal;
  int richardson_levels = 1;
  std::vector<int> ramps{8, 16, 32, 64};
  std::filesystem::path out_dir = ".";

  static RunConfig from(const ConfigMap& map);
  /// UsageError if an id is unknown or a value is out of range.
  void validate() const;
  /// UsageError unless a seed was given.
  std::uint64_t require_seed() const;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);

}  // namespace pathcalc
