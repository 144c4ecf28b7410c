#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "doco/error.hpp"

namespace doco {

/// Flat sectioned key-value config format:
///   [section]
///   key = value        # comment
/// Values: booleans, integers, reals, "strings", and [1, 2, 3] integer lists.
class Config {
 public:
  using Value = std::variant<bool, long, double, std::string, std::vector<long>>;

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("io-error", "cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static Config parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("config-parse", "unterminated section at line " + std::to_string(lineno));
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) fail("config-parse", "empty section name at line " + std::to_string(lineno));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) fail("config-parse", "expected key = value at line " + std::to_string(lineno));
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty()) fail("config-parse", "malformed entry at line " + std::to_string(lineno));
      cfg.data_[section][key] = parse_value(val, lineno);
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
  }

  template <class T>
  T get(const std::string& section, const std::string& key) const {
    const Value& v = raw(section, key);
    if constexpr (std::is_same_v<T, double>) {
      if (auto* l = std::get_if<long>(&v)) return static_cast<double>(*l);
    }
    if (auto* p = std::get_if<T>(&v)) return *p;
    fail("config-type", section + "." + key + " has the wrong type");
  }

  template <class T>
  T get_or(const std::string& section, const std::string& key, T fallback) const {
    if (!has(section, key)) return fallback;
    return get<T>(section, key);
  }

 private:
  const Value& raw(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    if (s == data_.end()) fail("config-missing", "missing section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) fail("config-missing", "missing key " + section + "." + key);
    return k->second;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static Value parse_value(const std::string& v, int lineno) {
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"') {
      if (v.size() < 2 || v.back() != '"') fail("config-parse", "unterminated string at line " + std::to_string(lineno));
      return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
      if (v.back() != ']') fail("config-parse", "unterminated list at line " + std::to_string(lineno));
      std::vector<long> out;
      std::string body = v.substr(1, v.size() - 2);
      std::istringstream items(body);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t pos = 0;
        long x = std::stol(item, &pos);
        if (pos != item.size()) fail("config-parse", "bad list entry at line " + std::to_string(lineno));
        out.push_back(x);
      }
      return out;
    }
    // number: integer unless it carries a decimal point or exponent
    try {
      std::size_t pos = 0;
      if (v.find_first_of(".eE") == std::string::npos) {
        long x = std::stol(v, &pos);
        if (pos == v.size()) return x;
      } else {
        double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
      }
    } catch (const std::exception&) {
    }
    fail("config-parse", "cannot parse value '" + v + "' at line " + std::to_string(lineno));
  }

  std::map<std::string, std::map<std::string, Value>> data_;
};

}  // namespace doco
