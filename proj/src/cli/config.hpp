#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsuite::cli {

// Raised for anything the user can fix in the config; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key = value table. Values are numbers, quoted strings, booleans, or
// bracketed arrays of numbers.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  // "key=value"; replaces any earlier value.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& raw) { values_[key] = raw; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& raw(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<long> get_longs(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace mcsuite::cli
