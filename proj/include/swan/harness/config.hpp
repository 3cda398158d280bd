// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "swan/channel.hpp"

namespace swan::harness {

/// Invalid experiment description. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure. Maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { SweepMFixedL, SweepMFixedSpan, SweepK, Convergence, OracleCheck };

enum class Scheme { SS, SA1, SA2, PASS };

inline constexpr std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::SweepMFixedL: return "sweep-m-fixed-L";
    case ExperimentKind::SweepMFixedSpan: return "sweep-m-fixed-span";
    case ExperimentKind::SweepK: return "sweep-k";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::OracleCheck: return "oracle-check";
  }
  return "?";
}

inline constexpr std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::SS: return "SS";
    case Scheme::SA1: return "SA1";
    case Scheme::SA2: return "SA2";
    case Scheme::PASS: return "PASS";
  }
  return "?";
}

inline ExperimentKind parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::SweepMFixedL, ExperimentKind::SweepMFixedSpan, ExperimentKind::SweepK,
                 ExperimentKind::Convergence, ExperimentKind::OracleCheck})
    if (to_string(k) == s) return k;
  // CLI subcommand spellings.
  if (s == "sweep-m") return ExperimentKind::SweepMFixedL;
  if (s == "sweep-m-span") return ExperimentKind::SweepMFixedSpan;
  throw ConfigError("kind: unknown experiment kind '" + std::string(s) + "'");
}

inline Scheme parse_scheme(std::string_view s) {
  for (auto v : {Scheme::SS, Scheme::SA1, Scheme::SA2, Scheme::PASS})
    if (to_string(v) == s) return v;
  throw ConfigError("schemes: unknown scheme '" + std::string(s) + "'");
}

/// Fully resolved experiment description. Powers are stored in watts.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::SweepMFixedL;
  std::vector<double> sweep_values;
  std::size_t k_users = 10;
  std::size_t m_segments = 5;   // used when M is not the swept quantity
  double seg_length = 1.0;      // ignored by the fixed-span sweep (L = d_x / M)
  double d_x = 100.0;
  double d_y = 20.0;
  double height = 3.0;
  double f_c = 28e9;
  double n_eff = 1.4;
  std::optional<double> delta_min;  // default: half a wavelength
  double p_tx = 1e-2;
  double noise_var = 1e-12;
  std::vector<double> kappas = {0.0, 0.08};
  std::optional<double> design_kappa;
  std::size_t q_grid = 1000;
  std::vector<Scheme> schemes = {Scheme::SS, Scheme::SA1, Scheme::SA2, Scheme::PASS};
  std::size_t restarts = 1;
  std::size_t max_iters = 100;
  double tol = 1e-8;
  std::size_t n_drops = 100;
  std::uint64_t master_seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool timing = false;      // wall-clock elapsed column; off keeps outputs byte-stable

  /// Keys that were filled from defaults rather than supplied.
  std::set<std::string> defaulted;

  [[nodiscard]] RadioConfig radio(double kappa) const {
    RadioConfig c;
    c.f_c = f_c;
    c.n_eff = n_eff;
    c.kappa = kappa;
    c.delta_min = delta_min.value_or(0.5 * kSpeedOfLight / f_c);
    c.p_tx = p_tx;
    c.noise_var = noise_var;
    return c;
  }

  void validate() const;
};

inline const std::vector<std::string>& spec_keys() {
  static const std::vector<std::string> keys = {
      "kind",     "sweep_values", "k_users",  "m_segments", "seg_length",   "d_x",     "d_y",
      "height",   "f_c",          "n_eff",    "delta_min",  "p_tx",         "noise_var", "kappas",
      "design_kappa", "q_grid",   "schemes",  "restarts",   "max_iters",    "tol",     "n_drops",
      "master_seed",  "threads",  "timing"};
  return keys;
}

/// Defaults of the desk-scale reproductions, per experiment kind.
inline ExperimentSpec defaults_for(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  switch (kind) {
    case ExperimentKind::SweepMFixedL:
      s.sweep_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      s.seg_length = 1.0;
      break;
    case ExperimentKind::SweepMFixedSpan:
      s.sweep_values = {1, 2, 5, 10, 20};
      break;
    case ExperimentKind::SweepK:
      s.sweep_values = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
      s.d_x = 50.0;
      break;
    case ExperimentKind::Convergence:
      s.sweep_values = {5};
      s.d_x = 50.0;
      s.schemes = {Scheme::SA1, Scheme::SA2};
      s.kappas = {0.0};
      break;
    case ExperimentKind::OracleCheck:
      s.sweep_values = {2};
      s.q_grid = 20;
      s.k_users = 4;
      s.d_x = 10.0;
      s.d_y = 4.0;
      s.n_drops = 20;
      s.kappas = {0.0};
      s.schemes = {Scheme::SS, Scheme::SA1, Scheme::SA2};
      break;
  }
  for (const auto& k : spec_keys()) s.defaulted.insert(k);
  s.defaulted.erase("kind");
  return s;
}

inline void ExperimentSpec::validate() const {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
  if (sweep_values.empty()) fail("sweep_values", "must not be empty");
  for (std::size_t i = 0; i < sweep_values.size(); ++i) {
    const double v = sweep_values[i];
    if (!(v >= 1.0) || std::floor(v) != v) fail("sweep_values", "entries must be positive integers");
    if (i > 0 && !(v > sweep_values[i - 1])) fail("sweep_values", "must be strictly increasing");
  }
  if (n_drops < 1) fail("n_drops", "must be >= 1");
  if (k_users < 1) fail("k_users", "must be >= 1");
  if (m_segments < 1) fail("m_segments", "must be >= 1");
  if (!(seg_length > 0.0)) fail("seg_length", "must be positive");
  if (!(d_x > 0.0)) fail("d_x", "must be positive");
  if (!(d_y > 0.0)) fail("d_y", "must be positive");
  if (!(height > 0.0)) fail("height", "must be positive");
  if (!(f_c > 0.0)) fail("f_c", "must be positive");
  if (!(n_eff >= 1.0)) fail("n_eff", "must be >= 1");
  if (delta_min && !(*delta_min > 0.0)) fail("delta_min", "must be positive");
  if (!(p_tx > 0.0)) fail("p_tx", "must be positive");
  if (!(noise_var > 0.0)) fail("noise_var", "must be positive");
  if (kappas.empty()) fail("kappas", "must not be empty");
  for (double k : kappas)
    if (!(k >= 0.0)) fail("kappas", "entries must be >= 0");
  if (design_kappa && !(*design_kappa >= 0.0)) fail("design_kappa", "must be >= 0");
  if (q_grid < 2) fail("q_grid", "must be >= 2");
  if (schemes.empty()) fail("schemes", "must not be empty");
  if (restarts < 1) fail("restarts", "must be >= 1");
  if (max_iters < 1) fail("max_iters", "must be >= 1");
  if (!(tol >= 0.0)) fail("tol", "must be >= 0");
  if (kind == ExperimentKind::OracleCheck && sweep_values.back() > 2.0)
    fail("sweep_values", "oracle-check supports M <= 2 (joint search grows as Q^M)");
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// "10 dBm", "0.01 W", "-90dBm" or a bare number (dBm) -> watts.
inline double parse_power(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return dbm_to_watts(v.get<double>());
  if (!v.is_string()) throw ConfigError(key + ": expected a number (dBm) or a string with units");
  const std::string s = v.get<std::string>();
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + s + "'");
  }
  const std::string unit = trim(std::string_view(s).substr(pos));
  if (unit.empty() || unit == "dBm") return dbm_to_watts(value);
  if (unit == "W") return value;
  if (unit == "mW") return value * 1e-3;
  throw ConfigError(key + ": unknown power unit '" + unit + "'");
}

/// "28 GHz", "28e9 Hz" or a bare number (Hz).
inline double parse_frequency(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ConfigError(key + ": expected a number (Hz) or a string with units");
  const std::string s = v.get<std::string>();
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + s + "'");
  }
  const std::string unit = trim(std::string_view(s).substr(pos));
  if (unit.empty() || unit == "Hz") return value;
  if (unit == "kHz") return value * 1e3;
  if (unit == "MHz") return value * 1e6;
  if (unit == "GHz") return value * 1e9;
  throw ConfigError(key + ": unknown frequency unit '" + unit + "'");
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(key + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
        throw ConfigError(key + ": expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(key + ": expected a number");
      return v.get<T>();
    } else {
      return v.get<T>();
    }
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key + ": type mismatch");
  }
}

inline std::vector<double> number_list(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(key + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

/// Applies the keys of a flat JSON object onto `spec`. Unknown keys and type
/// mismatches raise ConfigError naming the key.
inline void apply_json(ExperimentSpec& spec, const nlohmann::json& doc) {
  using detail::get_as;
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  const auto& keys = spec_keys();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw ConfigError(it.key() + ": unknown configuration key");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    if (key == "kind") {
      if (!v.is_string()) throw ConfigError("kind: expected a string");
      spec.kind = parse_kind(v.get<std::string>());
    } else if (key == "sweep_values") {
      spec.sweep_values = detail::number_list(v, key);
    } else if (key == "k_users") {
      spec.k_users = get_as<std::size_t>(v, key);
    } else if (key == "m_segments") {
      spec.m_segments = get_as<std::size_t>(v, key);
    } else if (key == "seg_length") {
      spec.seg_length = get_as<double>(v, key);
    } else if (key == "d_x") {
      spec.d_x = get_as<double>(v, key);
    } else if (key == "d_y") {
      spec.d_y = get_as<double>(v, key);
    } else if (key == "height") {
      spec.height = get_as<double>(v, key);
    } else if (key == "f_c") {
      spec.f_c = detail::parse_frequency(v, key);
    } else if (key == "n_eff") {
      spec.n_eff = get_as<double>(v, key);
    } else if (key == "delta_min") {
      if (v.is_null())
        spec.delta_min.reset();
      else
        spec.delta_min = get_as<double>(v, key);
    } else if (key == "p_tx") {
      spec.p_tx = detail::parse_power(v, key);
    } else if (key == "noise_var") {
      spec.noise_var = detail::parse_power(v, key);
    } else if (key == "kappas") {
      spec.kappas = detail::number_list(v, key);
    } else if (key == "design_kappa") {
      if (v.is_null())
        spec.design_kappa.reset();
      else
        spec.design_kappa = get_as<double>(v, key);
    } else if (key == "q_grid") {
      spec.q_grid = get_as<std::size_t>(v, key);
    } else if (key == "schemes") {
      if (!v.is_array()) throw ConfigError("schemes: expected an array of strings");
      spec.schemes.clear();
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError("schemes: expected an array of strings");
        spec.schemes.push_back(parse_scheme(e.get<std::string>()));
      }
    } else if (key == "restarts") {
      spec.restarts = get_as<std::size_t>(v, key);
    } else if (key == "max_iters") {
      spec.max_iters = get_as<std::size_t>(v, key);
    } else if (key == "tol") {
      spec.tol = get_as<double>(v, key);
    } else if (key == "n_drops") {
      spec.n_drops = get_as<std::size_t>(v, key);
    } else if (key == "master_seed") {
      spec.master_seed = get_as<std::uint64_t>(v, key);
    } else if (key == "threads") {
      spec.threads = get_as<std::size_t>(v, key);
    } else if (key == "timing") {
      spec.timing = get_as<bool>(v, key);
    }
    spec.defaulted.erase(key);
  }
}

inline constexpr std::string_view kRequiredFileKeys[] = {"kind", "sweep_values", "n_drops", "master_seed"};

/// Builds a spec from a JSON document: kind-specific defaults, then the
/// document. `expected_kind`, when given, must agree with the file.
inline ExperimentSpec parse_config(const nlohmann::json& doc, std::optional<ExperimentKind> expected_kind = {}) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (auto key : kRequiredFileKeys)
    if (!doc.contains(std::string(key))) throw ConfigError(std::string(key) + ": missing required key");
  if (!doc["kind"].is_string()) throw ConfigError("kind: expected a string");
  const ExperimentKind kind = parse_kind(doc["kind"].get<std::string>());
  if (expected_kind && *expected_kind != kind)
    throw ConfigError("kind: config file says '" + std::string(to_string(kind)) + "' but the command is '" +
                      std::string(to_string(*expected_kind)) + "'");
  ExperimentSpec spec = defaults_for(kind);
  apply_json(spec, doc);
  return spec;
}

inline ExperimentSpec parse_config_file(const std::string& path, std::optional<ExperimentKind> expected_kind = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, expected_kind);
}

/// Resolved parameters as JSON, with powers rendered in dBm.
inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(s.kind));
  j["sweep_values"] = s.sweep_values;
  j["k_users"] = s.k_users;
  j["m_segments"] = s.m_segments;
  j["seg_length"] = s.seg_length;
  j["d_x"] = s.d_x;
  j["d_y"] = s.d_y;
  j["height"] = s.height;
  j["f_c"] = s.f_c;
  j["n_eff"] = s.n_eff;
  j["delta_min"] = s.radio(0.0).delta_min;
  // Watts with round-trip precision; a bare number would be read back as dBm.
  auto watts = [](double w) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g W", w);
    return std::string(buf);
  };
  j["p_tx"] = watts(s.p_tx);
  j["noise_var"] = watts(s.noise_var);
  j["kappas"] = s.kappas;
  j["design_kappa"] = s.design_kappa ? nlohmann::json(*s.design_kappa) : nlohmann::json(nullptr);
  j["q_grid"] = s.q_grid;
  auto& sch = j["schemes"] = nlohmann::json::array();
  for (auto v : s.schemes) sch.push_back(std::string(to_string(v)));
  j["restarts"] = s.restarts;
  j["max_iters"] = s.max_iters;
  j["tol"] = s.tol;
  j["n_drops"] = s.n_drops;
  j["master_seed"] = s.master_seed;
  j["threads"] = s.threads;
  j["timing"] = s.timing;
  return j;
}

}  // namespace swan::harness
