#include "config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mcsuite::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      return false;
    }
  }
  return true;
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    c.values_[key] = trim(body.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  if (!valid_key(key)) throw ConfigError("--set: bad key '" + key + "'");
  values_[key] = trim(assignment.substr(eq + 1));
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_number(key, raw(key));
}

long Config::get_long(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ConfigError("config key '" + key + "': expected an integer");
  }
  return static_cast<long>(v);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string t = trim(raw(key));
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

bool Config::get_bool(const std::string& key) const {
  const std::string t = trim(raw(key));
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("config key '" + key + "': expected true or false");
}

std::string Config::get_string(const std::string& key) const {
  const std::string t = trim(raw(key));
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
  return t;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::string t = trim(raw(key));
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw ConfigError("config key '" + key + "': expected an array like [1, 2]");
  }
  t = t.substr(1, t.size() - 2);
  std::vector<double> out;
  if (trim(t).empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  return out;
}

std::vector<long> Config::get_longs(const std::string& key) const {
  std::vector<long> out;
  for (double v : get_doubles(key)) {
    if (v != std::floor(v)) {
      throw ConfigError("config key '" + key + "': expected integers");
    }
    out.push_back(static_cast<long>(v));
  }
  return out;
}

}  // namespace mcsuite::cli
