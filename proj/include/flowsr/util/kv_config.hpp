#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace flowsr::util {

// Flat "key = value" configuration with dotted keys, '#' comments and
// last-one-wins overrides. This is the single config format used by the CLI
// and by checkpoint/provenance echoes.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig from_file(const std::string& path);
  static KvConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  // Typed getters; *_or variants fall back, plain ones throw ConfigError.
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key) const;
  int64_t get_int_or(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, int64_t value);
  void set(const std::string& key, double value);
  void set(const std::string& key, bool value);

  // "key=value"; used for command-line overrides.
  void apply_override(const std::string& assignment);

  // Deterministic (sorted) round-trippable text form.
  std::string to_string() const;
  void save(const std::string& path) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Round-trippable formatting for doubles (shortest form that parses back
// exactly); shared by CSV and config writers so reruns are byte-identical.
std::string format_double(double v);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace flowsr::util
