#ifndef SPDELAB_CONFIG_HPP
#define SPDELAB_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/fingerprint.hpp"
#include "spdelab/grid.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/sigma.hpp"
#include "spdelab/solver.hpp"

// Plain-text configuration: `section.key = value` lines, `#` starts a comment.

namespace spdelab {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || v.empty())
    fail(ErrorKind::parse, "'" + std::string(key) + "' expects a number, got '" + v + "'");
  return out;
}

inline long long parse_int(std::string_view key, const std::string& v) {
  long long out = 0;
  int base = 10;
  std::string_view sv = v;
  if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'x' || sv[1] == 'X')) {
    base = 16;
    sv.remove_prefix(2);
  }
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out, base);
  if (ec != std::errc() || p != sv.data() + sv.size() || sv.empty())
    fail(ErrorKind::parse, "'" + std::string(key) + "' expects an integer, got '" + v + "'");
  return out;
}

inline std::uint64_t parse_u64(std::string_view key, const std::string& v) {
  std::uint64_t out = 0;
  int base = 10;
  std::string_view sv = v;
  if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'x' || sv[1] == 'X')) {
    base = 16;
    sv.remove_prefix(2);
  }
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out, base);
  if (ec != std::errc() || p != sv.data() + sv.size() || sv.empty())
    fail(ErrorKind::parse, "'" + std::string(key) + "' expects an unsigned integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(std::string_view key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::parse, "'" + std::string(key) + "' expects true/false, got '" + v + "'");
}

class Config {
 public:
  /// Parses config text. `origin` names the source in error messages.
  static Config parse(std::string_view text, const std::string& origin = "config") {
    Config c;
    std::size_t lineno = 0, pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::string t = trim(line);
      if (t.empty()) continue;
      c.set_line(t, origin + ":" + std::to_string(lineno));
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorKind::parse, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
  }

  /// Applies a `section.key=value` override.
  void set_line(const std::string& line, const std::string& origin = "--set") {
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::parse, origin + ": expected 'section.key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
      fail(ErrorKind::parse, origin + ": key '" + key + "' is not of the form section.key");
    kv_[key] = value;
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const KeyValues& values() const { return kv_; }

  std::string str(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
  }
  double num(const std::string& key, double def) const { return has(key) ? parse_double(key, kv_.at(key)) : def; }
  long long integer(const std::string& key, long long def) const {
    return has(key) ? parse_int(key, kv_.at(key)) : def;
  }
  std::uint64_t u64(const std::string& key, std::uint64_t def) const {
    return has(key) ? parse_u64(key, kv_.at(key)) : def;
  }
  bool flag(const std::string& key, bool def) const { return has(key) ? parse_bool(key, kv_.at(key)) : def; }

  std::vector<double> list(const std::string& key, std::vector<double> def) const {
    if (!has(key)) return def;
    std::vector<double> out;
    std::stringstream ss(kv_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) fail(ErrorKind::parse, "'" + key + "' expects a comma-separated list");
    return out;
  }

  std::vector<int> int_list(const std::string& key, std::vector<int> def) const {
    if (!has(key)) return def;
    std::vector<int> out;
    std::stringstream ss(kv_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(key, trim(item))));
    if (out.empty()) fail(ErrorKind::parse, "'" + key + "' expects a comma-separated list");
    return out;
  }

  /// Rejects keys outside `known` so that typos do not pass silently.
  void check_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : kv_)
      if (!known.count(k)) fail(ErrorKind::parse, "unknown config key '" + k + "'");
  }

  /// Canonical text (sorted keys) and its hash; independent of line order in the source.
  std::string canonical() const { return canonical_text(kv_); }
  std::string fingerprint() const { return spdelab::fingerprint(kv_); }

 private:
  KeyValues kv_;
};

// Builders from configuration keys to the library specs.

inline GridSpec grid_from(const Config& c) {
  GridSpec g;
  g.dim = static_cast<int>(c.integer("grid.dim", 1));
  g.n = static_cast<int>(c.integer("grid.n", 256));
  g.l = c.num("grid.l", 1.0);
  g.dt = c.num("grid.dt", 0.0);
  g.t_end = c.num("grid.t_end", 1.0);
  g.t_min = c.num("grid.t_min", 0.1 * g.t_end);
  g.validate();
  return g;
}

inline KernelSpec kernel_from(const Config& c, int dim) {
  KernelSpec k;
  k.kind = parse_kernel_kind(c.str("kernel.kind", "riesz"));
  k.alpha = c.num("kernel.alpha", 0.5);
  k.amplitude = c.num("kernel.amplitude", 1.0);
  k.dim = dim;
  return k;
}

inline SigmaSpec sigma_from(const Config& c) {
  SigmaSpec s;
  s.kind = parse_sigma_kind(c.str("sigma.kind", "lipschitz-linear"));
  s.scale = c.num("sigma.scale", 1.0);
  switch (s.kind) {
    case SigmaKind::lipschitz_linear: s.gamma = 1.0; break;
    case SigmaKind::sqrt_plus:
    case SigmaKind::viot: s.gamma = 0.5; break;
    default: s.gamma = c.num("sigma.gamma", 1.0);
  }
  s.growth_c = c.num("sigma.growth_c", std::abs(s.scale));
  if (s.kind == SigmaKind::table) {
    s.table_u = c.list("sigma.table_u", {});
    s.table_sigma = c.list("sigma.table_sigma", {});
  }
  s.validate();
  return s;
}

inline U0Spec u0_from(const Config& c, const std::string& prefix, U0Spec def) {
  U0Spec u = def;
  u.kind = parse_u0_kind(c.str(prefix + ".kind", std::string(to_string(def.kind))));
  u.value = c.num(prefix + ".value", def.value);
  u.k = static_cast<int>(c.integer(prefix + ".k", def.k));
  u.amplitude = c.num(prefix + ".amplitude", def.amplitude);
  u.offset = c.num(prefix + ".offset", def.offset);
  u.center = c.num(prefix + ".center", def.center);
  u.width = c.num(prefix + ".width", def.width);
  u.height = c.num(prefix + ".height", def.height);
  u.path = c.str(prefix + ".path", def.path);
  return u;
}

inline SimulationSpec simulation_from(const Config& c, std::uint64_t seed) {
  SimulationSpec s;
  s.grid = grid_from(c);
  s.kernel = kernel_from(c, s.grid.dim);
  s.kernel.validate();
  s.sigma = sigma_from(c);
  s.u0 = u0_from(c, "u0", U0Spec::constant(1.0));
  s.seed = seed;
  s.clip = c.flag("solver.clip", false);
  return s;
}

}  // namespace spdelab

#endif  // SPDELAB_CONFIG_HPP
