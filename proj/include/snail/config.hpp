#pragma once

// Run configuration: a flat table of dotted keys with typed defaults.
//
// Files are JSON objects, optionally nested ({"circuit": {"k1": 0.07}} is the
// same as {"circuit.k1": 0.07}), and may carry "schema_version": 1. Later files
// and --set overrides win. Unknown keys and type mismatches are ConfigErrors
// naming the key.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace snail {

inline constexpr int kConfigSchemaVersion = 1;

class Config {
 public:
  /// All documented keys at their default values.
  static Config defaults();

  void merge(const nlohmann::json& document, const std::string& origin);
  void merge_file(const std::string& path);
  /// "key=value"; the value is parsed as JSON, falling back to a plain string.
  void set(const std::string& assignment);

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, nlohmann::json>& values() const { return values_; }

  /// Nested object of every key, keys sorted.
  nlohmann::json snapshot() const;
  /// Compact dump of the snapshot; input of the config hash.
  std::string canonical() const;

 private:
  void assign(const std::string& key, const nlohmann::json& value, const std::string& origin);
  const nlohmann::json& at(const std::string& key) const;

  std::map<std::string, nlohmann::json> values_;
};

/// Keys of a config table, documented in the README.
std::vector<std::string> config_keys();

}  // namespace snail
