// config.hpp
// Flat "section.key = value" run configuration. Serialisation is canonical
// (fixed key order, shortest round-trip number formatting), and the config
// hash is FNV-1a over that text, so equal configs hash equally.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "gas_model.hpp"
#include "initial_data.hpp"
#include "solver.hpp"

namespace eulerdamp {

inline constexpr const char* kCodeVersion = "eulerdamp 0.1.0";

namespace cfgio {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + s + "' is not a finite number");
  return v;
}

inline std::size_t parse_size(const std::string& key, const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "': '" + s + "' is not a non-negative integer");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("key '" + key + "': '" + s + "' is not a boolean");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Parses "key = value" lines; '#' starts a comment. Duplicate keys are errors.
inline std::map<std::string, std::string> parse_pairs(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  return kv;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace cfgio

struct RunConfig {
  GasParams gas;
  DampingProfile damping;
  InitialDataSpec initial;
  SolverConfig solver;
  std::size_t n_cells = 4096;
  double half_width = 0.0;  // 0: sized from t_end so waves never reach the boundary
  int m = 2;
  std::size_t lattice_stations = 129;
  double fit_lo = 10.0;
  double fit_hi = 100.0;
  bool write_fields = false;
  std::string manufactured_target = "traveling";
  double manufactured_amplitude = 0.1;
  double manufactured_width = 1.0;
  std::vector<std::size_t> convergence_resolutions;  // empty: n, 2n, 4n
  std::size_t oracle_modes = 0;                      // 0: all
  double oracle_tol = 1e-10;

  /// Half-width actually used: R + 1.5 t_end (1 + 0.5) unless set.
  double domain_half_width() const {
    if (half_width > 0.0) return half_width;
    return initial.R + 1.5 * solver.t_end * 1.5;
  }
  UniformGrid grid() const { return UniformGrid::symmetric(domain_half_width(), n_cells); }

  void validate() const {
    gas.validate();
    damping.validate();
    initial.validate();
    solver.validate();
    if (n_cells < 8) throw ConfigError("solver.n_cells must be >= 8");
    if (solver.regrid && n_cells % 4 != 0) throw ConfigError("solver.regrid needs n_cells divisible by 4");
    if (half_width < 0.0) throw ConfigError("domain.half_width must be >= 0");
    if (half_width > 0.0 && half_width < initial.R) throw ConfigError("domain.half_width must be >= initial.R");
    if (m < 1) throw ConfigError("diagnostics.m must be >= 1");
    if (lattice_stations < 2) throw ConfigError("diagnostics.lattice_stations must be >= 2");
    if (!(fit_hi > fit_lo && fit_lo >= 0.0)) throw ConfigError("diagnostics fit window must satisfy 0 <= lo < hi");
    if (!(oracle_tol > 0.0)) throw ConfigError("oracle.tol must be > 0");
  }

  /// Canonical key/value list in fixed order.
  std::vector<std::pair<std::string, std::string>> to_pairs() const {
    using cfgio::format_double;
    std::string res;
    for (std::size_t i = 0; i < convergence_resolutions.size(); ++i)
      res += (i ? "," : "") + std::to_string(convergence_resolutions[i]);
    return {
        {"gas.gamma", format_double(gas.gamma)},
        {"damping.mu", format_double(damping.mu)},
        {"damping.lambda", format_double(damping.lambda)},
        {"initial.epsilon", format_double(initial.epsilon)},
        {"initial.R", format_double(initial.R)},
        {"initial.R0", format_double(initial.R0)},
        {"initial.rho_profile", initial.rho_profile.name()},
        {"initial.u_profile", initial.u_profile.name()},
        {"solver.n_cells", std::to_string(n_cells)},
        {"solver.cfl", format_double(solver.cfl)},
        {"solver.limiter", solver.limiter},
        {"solver.flux", solver.flux},
        {"solver.t_end", format_double(solver.t_end)},
        {"solver.snapshot_dt", format_double(solver.snapshot_dt)},
        {"solver.gradient_cap", format_double(solver.gradient_cap)},
        {"solver.steepness_cap", format_double(solver.steepness_cap)},
        {"solver.regrid", solver.regrid ? "true" : "false"},
        {"domain.half_width", format_double(half_width)},
        {"diagnostics.m", std::to_string(m)},
        {"diagnostics.lattice_stations", std::to_string(lattice_stations)},
        {"diagnostics.fit_lo", format_double(fit_lo)},
        {"diagnostics.fit_hi", format_double(fit_hi)},
        {"output.fields", write_fields ? "true" : "false"},
        {"manufactured.target", manufactured_target},
        {"manufactured.amplitude", format_double(manufactured_amplitude)},
        {"manufactured.width", format_double(manufactured_width)},
        {"convergence.resolutions", res},
        {"oracle.n_modes", std::to_string(oracle_modes)},
        {"oracle.tol", format_double(oracle_tol)},
    };
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : to_pairs()) out += k + " = " + v + "\n";
    return out;
  }

  std::string hash() const { return cfgio::hex64(cfgio::fnv1a(serialize())); }

  /// Applies one key; returns false for keys this struct does not own.
  bool apply(const std::string& key, const std::string& value) {
    using namespace cfgio;
    if (key == "gas.gamma") gas.gamma = parse_double(key, value);
    else if (key == "damping.mu") damping.mu = parse_double(key, value);
    else if (key == "damping.lambda") damping.lambda = parse_double(key, value);
    else if (key == "initial.epsilon") initial.epsilon = parse_double(key, value);
    else if (key == "initial.R") initial.R = parse_double(key, value);
    else if (key == "initial.R0") initial.R0 = parse_double(key, value);
    else if (key == "initial.rho_profile") initial.rho_profile = Profile::parse(value);
    else if (key == "initial.u_profile") initial.u_profile = Profile::parse(value);
    else if (key == "solver.n_cells") n_cells = parse_size(key, value);
    else if (key == "solver.cfl") solver.cfl = parse_double(key, value);
    else if (key == "solver.limiter") solver.limiter = value;
    else if (key == "solver.flux") solver.flux = value;
    else if (key == "solver.t_end") solver.t_end = parse_double(key, value);
    else if (key == "solver.snapshot_dt") solver.snapshot_dt = parse_double(key, value);
    else if (key == "solver.gradient_cap") solver.gradient_cap = parse_double(key, value);
    else if (key == "solver.steepness_cap") solver.steepness_cap = parse_double(key, value);
    else if (key == "solver.regrid") solver.regrid = parse_bool(key, value);
    else if (key == "domain.half_width") half_width = parse_double(key, value);
    else if (key == "diagnostics.m") m = static_cast<int>(parse_size(key, value));
    else if (key == "diagnostics.lattice_stations") lattice_stations = parse_size(key, value);
    else if (key == "diagnostics.fit_lo") fit_lo = parse_double(key, value);
    else if (key == "diagnostics.fit_hi") fit_hi = parse_double(key, value);
    else if (key == "output.fields") write_fields = parse_bool(key, value);
    else if (key == "manufactured.target") manufactured_target = value;
    else if (key == "manufactured.amplitude") manufactured_amplitude = parse_double(key, value);
    else if (key == "manufactured.width") manufactured_width = parse_double(key, value);
    else if (key == "convergence.resolutions") {
      convergence_resolutions.clear();
      for (const auto& item : split_list(value)) convergence_resolutions.push_back(parse_size(key, item));
    } else if (key == "oracle.n_modes") oracle_modes = parse_size(key, value);
    else if (key == "oracle.tol") oracle_tol = parse_double(key, value);
    else return false;
    return true;
  }

  static RunConfig from_pairs(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [k, v] : kv)
      if (!c.apply(k, v)) throw ConfigError("unknown key '" + k + "'");
    c.validate();
    return c;
  }

  static RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return from_pairs(cfgio::parse_pairs(in));
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return from_pairs(cfgio::parse_pairs(in));
  }
};

/// Cross-product sweep over selected RunConfig fields.
struct SweepSpec {
  RunConfig base;
  std::vector<double> mu, lambda, gamma, epsilon;
  std::vector<std::size_t> n_cells;
  bool two_resolution = true;

  std::size_t size() const {
    auto len = [](std::size_t n) { return n == 0 ? std::size_t{1} : n; };
    return len(mu.size()) * len(lambda.size()) * len(gamma.size()) * len(epsilon.size()) * len(n_cells.size());
  }

  /// Points in deterministic order (n_cells varies fastest, mu slowest).
  std::vector<RunConfig> points() const {
    std::vector<RunConfig> out;
    auto or_base = [](const auto& axis, auto base_value) {
      using T = decltype(base_value);
      return axis.empty() ? std::vector<T>{base_value} : std::vector<T>(axis.begin(), axis.end());
    };
    for (double a : or_base(mu, base.damping.mu))
      for (double l : or_base(lambda, base.damping.lambda))
        for (double g : or_base(gamma, base.gas.gamma))
          for (double e : or_base(epsilon, base.initial.epsilon))
            for (std::size_t n : or_base(n_cells, base.n_cells)) {
              RunConfig c = base;
              c.damping.mu = a;
              c.damping.lambda = l;
              c.gas.gamma = g;
              c.initial.epsilon = e;
              c.n_cells = n;
              c.validate();
              out.push_back(std::move(c));
            }
    return out;
  }

  std::string serialize() const {
    std::string out = base.serialize();
    auto list = [](const auto& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>) s += cfgio::format_double(v[i]);
        else s += std::to_string(v[i]);
      }
      return s;
    };
    out += "sweep.mu = " + list(mu) + "\n";
    out += "sweep.lambda = " + list(lambda) + "\n";
    out += "sweep.gamma = " + list(gamma) + "\n";
    out += "sweep.epsilon = " + list(epsilon) + "\n";
    out += "sweep.n_cells = " + list(n_cells) + "\n";
    out += std::string("sweep.two_resolution = ") + (two_resolution ? "true" : "false") + "\n";
    return out;
  }

  std::string hash() const { return cfgio::hex64(cfgio::fnv1a(serialize())); }

  static SweepSpec from_pairs(const std::map<std::string, std::string>& kv) {
    using namespace cfgio;
    SweepSpec s;
    std::map<std::string, std::string> base;
    auto doubles = [](const std::string& k, const std::string& v) {
      std::vector<double> out;
      for (const auto& item : split_list(v)) out.push_back(parse_double(k, item));
      return out;
    };
    for (const auto& [k, v] : kv) {
      if (k == "sweep.mu") s.mu = doubles(k, v);
      else if (k == "sweep.lambda") s.lambda = doubles(k, v);
      else if (k == "sweep.gamma") s.gamma = doubles(k, v);
      else if (k == "sweep.epsilon") s.epsilon = doubles(k, v);
      else if (k == "sweep.n_cells") {
        for (const auto& item : split_list(v)) s.n_cells.push_back(parse_size(k, item));
      } else if (k == "sweep.two_resolution") s.two_resolution = parse_bool(k, v);
      else if (k.starts_with("sweep.")) throw ConfigError("unknown key '" + k + "'");
      else base.emplace(k, v);
    }
    s.base = RunConfig::from_pairs(base);
    (void)s.points();  // validates every point
    return s;
  }

  static SweepSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file '" + path + "'");
    return from_pairs(cfgio::parse_pairs(in));
  }
};

}  // namespace eulerdamp
