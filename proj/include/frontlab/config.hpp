#pragma once

#include <map>
#include <string>
#include <vector>

namespace frontlab {

/// Flat key=value run configuration.  Every key has a default; parsing a
/// file or a --set override with an unknown key is an error.  The effective
/// configuration serializes canonically (sorted keys, full double
/// precision) so that re-parsing the echo reproduces it exactly.
class RunConfig {
 public:
  RunConfig();  // defaults

  static const std::map<std::string, std::string>& defaults();

  /// Parse key=value lines ('#' comments, blank lines ignored).
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  void merge_overrides(const std::vector<std::string>& key_equals_value);

  const std::string& raw(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Canonical echo of the effective configuration.
  std::string serialize() const;
  /// Parse a serialized echo (round-trips exactly).
  static RunConfig from_string(const std::string& text);

  bool operator==(const RunConfig& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace frontlab
