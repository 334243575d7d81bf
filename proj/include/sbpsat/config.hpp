#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sbpsat/errors.hpp"

namespace sbpsat {

// Flat key = value experiment description; '#' starts a comment.
class Config {
 public:
  Config() = default;

  static Config load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      std::string t = trim(line);
      if (t.empty()) continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      c.values_[key] = val;
    }
    return c;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required field '" + key + "'");
    return it->second;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  int get_int(const std::string& key) const { return parse_int(key, get(key)); }
  int get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  double get_double(const std::string& key) const { return parse_double(key, get(key)); }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  // comma/space separated integers
  std::vector<int> get_int_list(const std::string& key) const {
    std::string v = get(key);
    for (char& ch : v)
      if (ch == ',') ch = ' ';
    std::istringstream ss(v);
    std::vector<int> out;
    int x;
    while (ss >> x) out.push_back(x);
    if (out.empty()) throw ConfigError("field '" + key + "' has no integers");
    return out;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  static int parse_int(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      int x = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': '" + v + "' is not an integer");
    }
  }
  static double parse_double(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': '" + v + "' is not a number");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace sbpsat
