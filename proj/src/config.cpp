// Copyright 2026 The readout-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "readout/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace readout {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (allowed.find(key) == allowed.end())
      fail(path.empty() ? key : path + "." + key, "unknown key");
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path + "." + key, "non-finite number");
  return x;
}

double get_nonneg(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  const double x = get_number(obj, path, key, fallback);
  if (x < 0.0) fail(path + "." + key, "must be >= 0");
  return x;
}

void parse_params(const json& obj, const std::string& path, PhysicalParams& p) {
  check_keys(obj, path,
             {"g_ghz", "kappa_ghz", "gamma_ghz", "gamma_d_ghz", "delta_z_ghz",
              "detuning_c_ghz", "detuning_a_ghz", "delta_omega_ghz", "epsilon",
              "epsilon_auto", "eta"});
  p.g_ghz = get_nonneg(obj, path, "g_ghz", p.g_ghz);
  p.kappa_ghz = get_nonneg(obj, path, "kappa_ghz", p.kappa_ghz);
  p.gamma_d_ghz = get_nonneg(obj, path, "gamma_d_ghz", p.gamma_d_ghz);
  p.delta_z_ghz = get_number(obj, path, "delta_z_ghz", p.delta_z_ghz);
  p.detuning_c_ghz = get_number(obj, path, "detuning_c_ghz", p.detuning_c_ghz);
  p.detuning_a_ghz = get_number(obj, path, "detuning_a_ghz", p.detuning_a_ghz);
  p.delta_omega_ghz = get_number(obj, path, "delta_omega_ghz", p.delta_omega_ghz);
  p.eta = get_number(obj, path, "eta", p.eta);
  if (p.eta < 0.0 || p.eta > 1.0) fail(path + ".eta", "must be in [0,1]");

  if (obj.contains("gamma_ghz")) {
    const json& g = obj.at("gamma_ghz");
    if (g.is_number()) {
      const double v = g.get<double>();
      if (!std::isfinite(v) || v < 0.0) fail(path + ".gamma_ghz", "must be >= 0");
      p.gamma_ghz.assign(4, v);
    } else if (g.is_array()) {
      if (g.empty() || g.size() > 4)
        fail(path + ".gamma_ghz", "expected 1..4 entries");
      p.gamma_ghz.clear();
      for (const auto& v : g) {
        if (!v.is_number()) fail(path + ".gamma_ghz", "expected numbers");
        const double x = v.get<double>();
        if (!std::isfinite(x) || x < 0.0) fail(path + ".gamma_ghz", "must be >= 0");
        p.gamma_ghz.push_back(x);
      }
      if (p.gamma_ghz.size() == 1) p.gamma_ghz.assign(4, p.gamma_ghz[0]);
    } else {
      fail(path + ".gamma_ghz", "expected number or array");
    }
  }

  const bool has_eps = obj.contains("epsilon");
  const bool auto_flag = obj.contains("epsilon_auto") &&
                         [&] {
                           const json& v = obj.at("epsilon_auto");
                           if (!v.is_boolean())
                             fail(path + ".epsilon_auto", "expected a boolean");
                           return v.get<bool>();
                         }();
  if (has_eps && auto_flag)
    fail(path + ".epsilon", "give either epsilon or epsilon_auto, not both");
  if (has_eps) {
    p.epsilon = get_nonneg(obj, path, "epsilon", 0.0);
    if (p.epsilon == 0.0) fail(path + ".epsilon", "must be > 0 (or use epsilon_auto)");
  } else {
    p.epsilon = 0.0;  // auto: resolved by default_epsilon at build time
  }
}

void parse_grid(const json& obj, const std::string& path, GridSpec& g) {
  check_keys(obj, path, {"n_points", "t_geo_start_ns", "t_geo_end_ns", "t_max_ns"});
  const double n = get_number(obj, path, "n_points", static_cast<double>(g.n_points));
  if (n < 8 || n != std::floor(n)) fail(path + ".n_points", "expected an integer >= 8");
  g.n_points = static_cast<std::size_t>(n);
  g.t_geo_start = get_number(obj, path, "t_geo_start_ns", g.t_geo_start);
  g.t_geo_end = get_number(obj, path, "t_geo_end_ns", g.t_geo_end);
  g.t_max = get_number(obj, path, "t_max_ns", g.t_max);
  if (g.t_geo_start <= 0.0 || g.t_geo_end <= g.t_geo_start || g.t_max <= g.t_geo_end)
    fail(path, "requires 0 < t_geo_start < t_geo_end < t_max");
}

void parse_integrator(const json& obj, const std::string& path, IntegratorSpec& s) {
  check_keys(obj, path, {"rel_tol", "abs_tol", "max_step_ns", "grid"});
  s.rel_tol = get_number(obj, path, "rel_tol", s.rel_tol);
  s.abs_tol = get_number(obj, path, "abs_tol", s.abs_tol);
  if (s.rel_tol <= 0.0) fail(path + ".rel_tol", "must be > 0");
  if (s.abs_tol <= 0.0) fail(path + ".abs_tol", "must be > 0");
  s.max_step = get_nonneg(obj, path, "max_step_ns", s.max_step);
  if (obj.contains("grid")) {
    if (!obj.at("grid").is_object()) fail(path + ".grid", "expected an object");
    parse_grid(obj.at("grid"), path + ".grid", s.grid);
  }
}

void parse_diffusion(const json& obj, const std::string& path, DiffusionSpec& d) {
  check_keys(obj, path, {"gamma_I_ghz", "n_nodes", "span"});
  d.gamma_I_ghz = get_nonneg(obj, path, "gamma_I_ghz", d.gamma_I_ghz);
  const double n = get_number(obj, path, "n_nodes", static_cast<double>(d.n_nodes));
  if (n < 3 || n != std::floor(n) || static_cast<int>(n) % 2 == 0)
    fail(path + ".n_nodes", "expected an odd integer >= 3");
  d.n_nodes = static_cast<int>(n);
  d.span = get_nonneg(obj, path, "span", d.span);
}

void parse_sweep(const json& obj, const std::string& path, SweepSpec& s) {
  check_keys(obj, path, {"name", "values"});
  if (!obj.contains("name") || !obj.at("name").is_string())
    fail(path + ".name", "expected a string");
  s.name = obj.at("name").get<std::string>();
  static const std::set<std::string> whitelist = {
      "eta", "delta_z", "gamma_d", "gamma_I", "cooperativity", "eta_T_nin"};
  if (whitelist.find(s.name) == whitelist.end())
    fail(path + ".name", "'" + s.name + "' is not a sweepable parameter");
  if (!obj.contains("values") || !obj.at("values").is_array() ||
      obj.at("values").empty())
    fail(path + ".values", "expected a non-empty array");
  s.values.clear();
  for (const auto& v : obj.at("values")) {
    if (!v.is_number()) fail(path + ".values", "expected numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path + ".values", "non-finite number");
    s.values.push_back(x);
  }
}

void parse_analytic(const json& obj, const std::string& path, Scenario& sc) {
  check_keys(obj, path, {"c_values", "eta_T_nin_max", "n_points"});
  if (obj.contains("c_values")) {
    const json& cv = obj.at("c_values");
    if (!cv.is_array() || cv.empty()) fail(path + ".c_values", "expected a non-empty array");
    sc.c_values.clear();
    for (const auto& v : cv) {
      if (!v.is_number()) fail(path + ".c_values", "expected numbers");
      sc.c_values.push_back(v.get<double>());
    }
  }
  sc.eta_T_nin_max = get_nonneg(obj, path, "eta_T_nin_max", sc.eta_T_nin_max);
  const double n =
      get_number(obj, path, "n_points", static_cast<double>(sc.analytic_points));
  if (n < 2 || n != std::floor(n)) fail(path + ".n_points", "expected an integer >= 2");
  sc.analytic_points = static_cast<int>(n);
}

Scenario parse_document(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  Scenario sc = default_scenario();
  check_keys(doc, "",
             {"model", "params", "integrator", "diffusion", "sweep", "n_fock",
              "engine", "analytic"});

  if (doc.contains("model")) {
    if (!doc.at("model").is_string()) fail("model", "expected a string");
    const std::string m = doc.at("model").get<std::string>();
    if (m == "three_level")
      sc.model = ModelKind::three_level;
    else if (m == "four_level")
      sc.model = ModelKind::four_level;
    else if (m == "analytic")
      sc.model = ModelKind::analytic;
    else
      fail("model", "'" + m + "' is not one of three_level|four_level|analytic");
  }
  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) fail("params", "expected an object");
    parse_params(doc.at("params"), "params", sc.params);
  }
  if (doc.contains("integrator")) {
    if (!doc.at("integrator").is_object()) fail("integrator", "expected an object");
    parse_integrator(doc.at("integrator"), "integrator", sc.integrator);
  }
  if (doc.contains("diffusion")) {
    if (!doc.at("diffusion").is_object()) fail("diffusion", "expected an object");
    parse_diffusion(doc.at("diffusion"), "diffusion", sc.diffusion);
  }
  if (doc.contains("sweep")) {
    if (!doc.at("sweep").is_object()) fail("sweep", "expected an object");
    SweepSpec sweep;
    parse_sweep(doc.at("sweep"), "sweep", sweep);
    sc.sweep = sweep;
  }
  if (doc.contains("n_fock")) {
    const double n = get_number(doc, "", "n_fock", static_cast<double>(sc.n_fock));
    if (n < 2 || n != std::floor(n)) fail("n_fock", "expected an integer >= 2");
    sc.n_fock = static_cast<std::size_t>(n);
  }
  if (doc.contains("engine")) {
    if (!doc.at("engine").is_string()) fail("engine", "expected a string");
    const std::string e = doc.at("engine").get<std::string>();
    if (e == "auto")
      sc.engine = EngineKind::auto_select;
    else if (e == "rk45")
      sc.engine = EngineKind::rk45;
    else if (e == "spectral")
      sc.engine = EngineKind::spectral;
    else
      fail("engine", "'" + e + "' is not one of auto|rk45|spectral");
  }
  if (doc.contains("analytic")) {
    if (!doc.at("analytic").is_object()) fail("analytic", "expected an object");
    parse_analytic(doc.at("analytic"), "analytic", sc);
  }
  return sc;
}

json parse_override_value(const std::string& text, const std::string& key) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) {
    // bare words are strings (model=four_level without quotes)
    return json(text);
  }
  if (v.is_number() && !std::isfinite(v.get<double>()))
    throw ConfigError("config: override " + key + ": non-finite number");
  return v;
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("config: override '" + spec + "' is not key=value");
  const std::string key = spec.substr(0, eq);
  const std::string val = spec.substr(eq + 1);

  json* node = &doc;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot - pos);
    if (part.empty()) throw ConfigError("config: override '" + spec + "': empty key segment");
    if (dot == std::string::npos) {
      (*node)[part] = parse_override_value(val, key);
      return;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

}  // namespace

Scenario default_scenario() {
  Scenario sc;  // the struct defaults are the quantum-dot parameter set
  return sc;
}

Scenario parse_config_text(const std::string& json_text,
                           const std::vector<std::string>& overrides) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config: invalid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_document(doc);
}

Scenario parse_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

std::string example_config_json() {
  return R"({
  "model": "four_level",
  "params": {
    "g_ghz": 20.0,
    "kappa_ghz": 6.0,
    "gamma_ghz": [0.1, 0.1, 0.1, 0.1],
    "gamma_d_ghz": 0.0,
    "delta_z_ghz": 100.0,
    "detuning_c_ghz": 0.0,
    "detuning_a_ghz": 0.0,
    "delta_omega_ghz": 0.0,
    "epsilon_auto": true,
    "eta": 0.01
  },
  "n_fock": 8,
  "engine": "auto",
  "integrator": {
    "rel_tol": 1e-8,
    "abs_tol": 1e-10,
    "grid": {"n_points": 600, "t_geo_start_ns": 0.1, "t_geo_end_ns": 10.0, "t_max_ns": 400.0}
  },
  "diffusion": {"gamma_I_ghz": 0.0, "n_nodes": 21},
  "sweep": {"name": "eta", "values": [0.005, 0.01, 0.025, 0.05]}
}
)";
}

}  // namespace readout
