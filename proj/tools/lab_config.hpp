#pragma once

// Flat key=value configuration for liouville_lab.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "liouville/errors.hpp"

namespace lab {

using liouville::Error;
using liouville::ErrorKind;

inline const std::map<std::string, std::set<std::string>>& command_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"family-sweep", {"alpha", "a", "b", "n", "steps"}},
      {"solve-radial", {"alpha", "b", "M", "r_max", "tol", "per_decade"}},
      {"solve-2d", {"alpha", "b", "mu", "grid", "extent", "trace", "lambda", "newton_tol"}},
      {"rearrange", {"source", "field", "alpha", "a", "b", "n", "mu", "grid", "clip", "levels"}},
      {"audit-huber", {"boundary", "alpha", "h", "sx", "sy"}},
      {"audit-suzuki", {"field", "alpha", "b", "mu", "grid", "lambda", "count", "seed"}},
      {"blowup", {"source", "field", "alpha", "a", "b", "n", "rho", "threshold", "eps0"}},
      {"supinf-sweep", {"alpha", "a", "b", "n", "steps", "grid"}},
      {"reproduce-all", {}},
  };
  return keys;
}

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;

  bool has(const std::string& k) const { return params.count(k) != 0; }

  std::string str(const std::string& k, const std::string& fallback) const {
    auto it = params.find(k);
    return it == params.end() ? fallback : it->second;
  }

  double num(const std::string& k, double fallback) const {
    auto it = params.find(k);
    return it == params.end() ? fallback : parse_scalar(k, it->second);
  }

  int integer(const std::string& k, int fallback) const {
    double v = num(k, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ErrorKind::usage, "key " + k + " needs an integer");
    return static_cast<int>(v);
  }

  static double parse_scalar(const std::string& key, const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
      throw Error(ErrorKind::usage, "cannot parse value '" + s + "' for key " + key);
    return v;
  }

  /// Scalar, comma list, or lo..hi expanded to `steps` geometric values.
  std::vector<double> ladder(const std::string& k, const std::string& fallback, int steps_fallback) const {
    std::string s = str(k, fallback);
    std::vector<double> out;
    if (auto dots = s.find(".."); dots != std::string::npos) {
      double lo = parse_scalar(k, s.substr(0, dots)), hi = parse_scalar(k, s.substr(dots + 2));
      int steps = integer("steps", steps_fallback);
      if (steps < 2 || !(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::usage, "range " + s + " for key " + k + " needs 0 < lo < hi and steps >= 2");
      const double l0 = std::log10(lo), l1 = std::log10(hi);
      for (int i = 0; i < steps; ++i) out.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (steps - 1)));
      // Keep the endpoints exact.
      out.front() = lo;
      out.back() = hi;
      return out;
    }
    std::size_t pos = 0;
    while (pos <= s.size()) {
      auto c = s.find(',', pos);
      out.push_back(parse_scalar(k, s.substr(pos, c == std::string::npos ? std::string::npos : c - pos)));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    return out;
  }
};

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline std::pair<std::string, std::string> split_pair(const std::string& raw, const std::string& where) {
  auto eq = raw.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::usage, "expected key=value, got '" + raw + "' " + where);
  return {trim(raw.substr(0, eq)), trim(raw.substr(eq + 1))};
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto [k, v] = split_pair(line, "at " + path + ":" + std::to_string(lineno));
    kv[k] = v;
  }
  return kv;
}

/// File values first, then positional/flag arguments on top. Arguments are
/// `command`, `key=value` or `--key=value`.
inline RunConfig parse_config(const std::map<std::string, std::string>& file, const std::vector<std::string>& args) {
  std::map<std::string, std::string> kv = file;
  bool seen_command = false;
  for (const auto& raw : args) {
    std::string a = raw;
    if (a.rfind("--", 0) == 0) a = a.substr(2);
    if (a.find('=') == std::string::npos) {
      if (seen_command) throw Error(ErrorKind::usage, "more than one command given: " + raw);
      seen_command = true;
      kv["command"] = a;
      continue;
    }
    auto [k, v] = split_pair(a, "on the command line");
    kv[k] = v;
  }
  RunConfig cfg;
  auto it = kv.find("command");
  if (it == kv.end()) throw Error(ErrorKind::usage, "missing required key: command");
  cfg.command = it->second;
  kv.erase(it);
  auto allowed = command_keys().find(cfg.command);
  if (allowed == command_keys().end()) throw Error(ErrorKind::usage, "unknown command: " + cfg.command);
  for (const auto& [k, v] : kv)
    if (!allowed->second.count(k)) throw Error(ErrorKind::usage, "unknown key for " + cfg.command + ": " + k);
  cfg.params = std::move(kv);
  return cfg;
}

}  // namespace lab
