#pragma once

// Run configuration: a flat "key = value" text format (one pair per line, '#'
// comments), fully defaulted, unknown keys rejected. The canonical key list
// lives in docs/config.md. The config hash covers the semantic fields only:
// workers, output directory, and formats may vary without changing results.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/params.hpp"
#include "cdu/uav.hpp"

namespace cdu {

enum class Experiment { Deterministic, Interval, Distributional, Adaptive, Selftest };

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Deterministic: return "deterministic";
    case Experiment::Interval: return "interval";
    case Experiment::Distributional: return "distributional";
    case Experiment::Adaptive: return "adaptive";
    case Experiment::Selftest: return "selftest";
  }
  throw contract_error("experiment_name: unknown experiment");
}

inline Experiment parse_experiment(const std::string& s) {
  if (s == "deterministic") return Experiment::Deterministic;
  if (s == "interval") return Experiment::Interval;
  if (s == "distributional") return Experiment::Distributional;
  if (s == "adaptive") return Experiment::Adaptive;
  if (s == "selftest") return Experiment::Selftest;
  throw config_error("unknown experiment '" + s +
                     "' (expected deterministic|interval|distributional|adaptive|selftest)");
}

// Environment variable consulted for the default output directory.
inline constexpr const char* kOutDirEnvVar = "CDU_OUT_DIR";

struct RunConfig {
  Experiment experiment = Experiment::Deterministic;
  std::string catalog_path;  // empty: built-in catalog
  std::vector<double> payload_grid_g = uav::default_payload_grid();
  std::uint64_t n = 2000;
  std::uint64_t seed = 0;
  double rho = 0.9;        // inner-bound per-parameter probability
  double fraction = 0.05;  // interval perturbation fraction
  unsigned workers = 1;
  std::string out_dir;  // empty: $CDU_OUT_DIR, else "out"
  std::vector<std::string> formats = {"csv"};
  Calibration calibration;  // fraction 0.05 at level 0.90
  int inner_n = 200;        // nested-MC samples inside adaptive policies
  uav::TaskProfile task;
  double frame_mass_g = 0.0;
  double perception_c0_w = 5.0;
  double perception_c1_w_per_mps = 2.0;
  double cruise_velocity_mps = 3.0;
  double trace_tol = 1e-9;

  std::string resolved_out_dir() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv(kOutDirEnvVar); env != nullptr && env[0] != '\0') {
      return env;
    }
    return "out";
  }

  uav::UavParams uav_params() const {
    uav::UavParams u;
    u.frame_mass_g = frame_mass_g;
    u.perception_c0_w = perception_c0_w;
    u.perception_c1_w_per_mps = perception_c1_w_per_mps;
    u.cruise_velocity_mps = cruise_velocity_mps;
    u.payload_grid_g = payload_grid_g;
    u.trace.tol = trace_tol;
    return u;
  }

  void validate() const {
    require_cfg(n >= 1, "n must be >= 1");
    require_cfg(workers >= 1, "workers must be >= 1");
    require_cfg(rho > 0.0 && rho < 1.0, "rho must lie in (0,1)");
    require_cfg(fraction >= 0.0 && fraction < 1.0, "fraction must lie in [0,1)");
    require_cfg(calibration.fraction >= 0.0, "calibration.fraction must be >= 0");
    require_cfg(calibration.level > 0.0 && calibration.level < 1.0,
                "calibration.level must lie in (0,1)");
    require_cfg(inner_n >= 1, "inner_n must be >= 1");
    require_cfg(!payload_grid_g.empty(), "payload_grid must be nonempty");
    for (std::size_t i = 0; i + 1 < payload_grid_g.size(); ++i) {
      require_cfg(payload_grid_g[i] < payload_grid_g[i + 1],
                  "payload_grid must be strictly increasing");
    }
    for (double p : payload_grid_g) require_cfg(p >= 0.0, "payloads must be >= 0");
    require_cfg(task.num_missions >= 1.0, "task.missions must be >= 1");
    require_cfg(task.distance_m > 0.0, "task.distance must be > 0");
    require_cfg(cruise_velocity_mps > 0.0, "uav.velocity must be > 0");
    require_cfg(perception_c0_w >= 0.0 && perception_c1_w_per_mps >= 0.0,
                "perception coefficients must be >= 0");
    require_cfg(frame_mass_g >= 0.0, "uav.frame_mass must be >= 0");
    require_cfg(trace_tol > 0.0, "uav.trace_tol must be > 0");
    require_cfg(!formats.empty(), "format must name at least one of csv,json,svg");
    for (const std::string& f : formats) {
      require_cfg(f == "csv" || f == "json" || f == "svg",
                  "format entries must be csv, json, or svg");
    }
  }

 private:
  static void require_cfg(bool ok, const char* msg) {
    if (!ok) throw config_error(msg);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw config_error("key '" + key + "': trailing junk in '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  if (s.empty() || s[0] == '-') {
    throw config_error("key '" + key + "': expected an unsigned integer, got '" + s + "'");
  }
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': expected an unsigned integer, got '" + s + "'");
  }
  if (pos != s.size()) throw config_error("key '" + key + "': trailing junk in '" + s + "'");
  return v;
}

}  // namespace detail

// Applies one key/value pair; shared by the file parser and the CLI overrides.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_u64;
  if (key == "experiment") {
    cfg.experiment = parse_experiment(value);
  } else if (key == "catalog") {
    cfg.catalog_path = value;
  } else if (key == "payload_grid") {
    std::vector<double> grid;
    for (const std::string& item : detail::split_list(value)) {
      grid.push_back(parse_double(item, key));
    }
    cfg.payload_grid_g = std::move(grid);
  } else if (key == "n") {
    cfg.n = parse_u64(value, key);
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, key);
  } else if (key == "rho") {
    cfg.rho = parse_double(value, key);
  } else if (key == "fraction") {
    cfg.fraction = parse_double(value, key);
  } else if (key == "workers") {
    cfg.workers = static_cast<unsigned>(parse_u64(value, key));
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "format") {
    cfg.formats = detail::split_list(value);
  } else if (key == "calibration.fraction") {
    cfg.calibration.fraction = parse_double(value, key);
  } else if (key == "calibration.level") {
    cfg.calibration.level = parse_double(value, key);
  } else if (key == "inner_n") {
    cfg.inner_n = static_cast<int>(parse_u64(value, key));
  } else if (key == "task.missions") {
    cfg.task.num_missions = parse_double(value, key);
  } else if (key == "task.distance") {
    cfg.task.distance_m = parse_double(value, key);
  } else if (key == "task.frequency") {
    cfg.task.mission_frequency_per_day = parse_double(value, key);
  } else if (key == "uav.frame_mass") {
    cfg.frame_mass_g = parse_double(value, key);
  } else if (key == "uav.c0") {
    cfg.perception_c0_w = parse_double(value, key);
  } else if (key == "uav.c1") {
    cfg.perception_c1_w_per_mps = parse_double(value, key);
  } else if (key == "uav.velocity") {
    cfg.cruise_velocity_mps = parse_double(value, key);
  } else if (key == "uav.trace_tol") {
    cfg.trace_tol = parse_double(value, key);
  } else {
    throw config_error("unknown config key '" + key + "'");
  }
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const config_error& e) {
      throw config_error("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

// Canonical serialization of the semantic fields. Workers, output directory,
// and formats are deliberately absent: they must not change result bytes.
inline std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "experiment = " << experiment_name(cfg.experiment) << '\n';
  out << "catalog = " << cfg.catalog_path << '\n';
  out << "payload_grid =";
  for (double p : cfg.payload_grid_g) out << ' ' << p;
  out << '\n';
  out << "n = " << cfg.n << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "rho = " << cfg.rho << '\n';
  out << "fraction = " << cfg.fraction << '\n';
  out << "calibration.fraction = " << cfg.calibration.fraction << '\n';
  out << "calibration.level = " << cfg.calibration.level << '\n';
  out << "inner_n = " << cfg.inner_n << '\n';
  out << "task.missions = " << cfg.task.num_missions << '\n';
  out << "task.distance = " << cfg.task.distance_m << '\n';
  out << "task.frequency = " << cfg.task.mission_frequency_per_day << '\n';
  out << "uav.frame_mass = " << cfg.frame_mass_g << '\n';
  out << "uav.c0 = " << cfg.perception_c0_w << '\n';
  out << "uav.c1 = " << cfg.perception_c1_w_per_mps << '\n';
  out << "uav.velocity = " << cfg.cruise_velocity_mps << '\n';
  out << "uav.trace_tol = " << cfg.trace_tol << '\n';
  return out.str();
}

// FNV-1a over the canonical serialization, rendered as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  const std::string s = canonical_config(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace cdu
