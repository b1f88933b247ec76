#include "relmetro_cli.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace relmetro::cli {

namespace {

using nlohmann::json;

void only_keys(const json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be a JSON object", where));
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : keys) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(fmt::format("unknown key '{}' in '{}'", item.key(), where));
  }
}

template <class V>
void read(const json& j, const char* key, V& into, const char* where) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<V>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("'{}.{}' has the wrong type", where, key));
  }
}

int read_int(const json& j, const char* key, int fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 2e9) return static_cast<int>(d);
  }
  throw ConfigError(fmt::format("'{}.{}' must be an integer", where, key));
}

void parse_scenario(const json& j, RunConfig& cfg) {
  only_keys(j, "scenario",
            {"length_m", "sound_speed_m_per_s", "light_speed_m_per_s", "k", "kprime", "squeezing_r",
             "drive_omega_rad_per_s", "duration_s", "n_max", "n_measurements", "spectrum_prefactor",
             "acceleration_m_per_s2"});
  CavityScenario& s = cfg.scenario;
  read(j, "length_m", s.length_m, "scenario");
  read(j, "sound_speed_m_per_s", s.sound_speed_m_per_s, "scenario");
  read(j, "light_speed_m_per_s", s.light_speed_m_per_s, "scenario");
  s.k = read_int(j, "k", s.k, "scenario");
  s.kprime = read_int(j, "kprime", s.kprime, "scenario");
  read(j, "squeezing_r", s.r, "scenario");
  if (j.contains("drive_omega_rad_per_s") && !j.at("drive_omega_rad_per_s").is_null()) {
    double w = 0;
    read(j, "drive_omega_rad_per_s", w, "scenario");
    s.omega_rad_per_s = w;
  }
  read(j, "duration_s", s.tau_s, "scenario");
  s.n_max = read_int(j, "n_max", s.n_max, "scenario");
  read(j, "n_measurements", s.n_measurements, "scenario");
  read(j, "spectrum_prefactor", s.spectrum_prefactor, "scenario");
  read(j, "acceleration_m_per_s2", cfg.acceleration_m_per_s2, "scenario");
}

void parse_sweep(const json& j, RunConfig& cfg) {
  only_keys(j, "sweep", {"parameter", "start", "stop", "count", "spacing", "stroboscopic"});
  SweepSpec sw;
  read(j, "parameter", sw.parameter, "sweep");
  read(j, "start", sw.start, "sweep");
  read(j, "stop", sw.stop, "sweep");
  sw.count = read_int(j, "count", sw.count, "sweep");
  read(j, "spacing", sw.spacing, "sweep");
  read(j, "stroboscopic", sw.stroboscopic, "sweep");
  if (!j.contains("parameter") || !j.contains("start") || !j.contains("stop") || !j.contains("count"))
    throw ConfigError("sweep needs parameter, start, stop and count");
  static const std::set<std::string> params = {"tau", "r", "a", "omega"};
  if (!params.count(sw.parameter)) throw ConfigError(fmt::format("cannot sweep unknown parameter '{}'", sw.parameter));
  if (sw.spacing != "linear" && sw.spacing != "log")
    throw ConfigError(fmt::format("sweep spacing must be linear or log, got '{}'", sw.spacing));
  if (sw.count < 2) throw ConfigError("sweep count must be at least 2");
  if (!(sw.start < sw.stop)) throw ConfigError("sweep start must be below stop");
  if (sw.spacing == "log" && !(sw.start > 0)) throw ConfigError("log sweep needs a positive start");
  if (sw.stroboscopic && sw.parameter != "tau") throw ConfigError("stroboscopic snapping applies to tau sweeps only");
  cfg.sweep = sw;
}

void parse_figure2(const json& j, RunConfig& cfg) {
  only_keys(j, "figure2", {"tau_start_s", "tau_stop_s", "count", "r_values", "stroboscopic"});
  Figure2Spec& f = cfg.figure2;
  read(j, "tau_start_s", f.tau_start_s, "figure2");
  read(j, "tau_stop_s", f.tau_stop_s, "figure2");
  f.count = read_int(j, "count", f.count, "figure2");
  read(j, "r_values", f.r_values, "figure2");
  read(j, "stroboscopic", f.stroboscopic, "figure2");
  if (!(f.tau_start_s > 0) || !(f.tau_start_s < f.tau_stop_s)) throw ConfigError("figure2 needs 0 < tau_start < tau_stop");
  if (f.count < 2) throw ConfigError("figure2 count must be at least 2");
  if (f.r_values.empty()) throw ConfigError("figure2 needs at least one squeezing value");
}

StateSpec parse_state(const json& j, const char* where, double default_r) {
  only_keys(j, where, {"squeezing_r", "acceleration_m_per_s2", "covariance"});
  StateSpec s{default_r, default_r, std::nullopt, std::nullopt};
  if (j.contains("squeezing_r")) {
    const json& v = j.at("squeezing_r");
    if (v.is_number()) {
      s.r_k = s.r_kprime = v.get<double>();
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      s.r_k = v[0].get<double>();
      s.r_kprime = v[1].get<double>();
    } else {
      throw ConfigError(fmt::format("'{}.squeezing_r' must be a number or a pair", where));
    }
  }
  if (j.contains("acceleration_m_per_s2")) {
    double a = 0;
    read(j, "acceleration_m_per_s2", a, where);
    s.acceleration_m_per_s2 = a;
  }
  if (j.contains("covariance")) {
    std::vector<std::vector<double>> rows;
    read(j, "covariance", rows, where);
    if (rows.size() != 4) throw ConfigError(fmt::format("'{}.covariance' must be 4x4", where));
    Eigen::Matrix4d c;
    for (int i = 0; i < 4; ++i) {
      if (rows[i].size() != 4) throw ConfigError(fmt::format("'{}.covariance' must be 4x4", where));
      for (int q = 0; q < 4; ++q) c(i, q) = rows[i][q];
    }
    if (s.acceleration_m_per_s2) throw ConfigError(fmt::format("'{}' cannot combine covariance and acceleration", where));
    s.covariance = c;
  }
  return s;
}

}  // namespace

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    if (spacing == "log")
      g[i] = std::exp(std::log(start) + t * (std::log(stop) - std::log(start)));
    else
      g[i] = start + t * (stop - start);
  }
  g.front() = start;
  g.back() = stop;
  return g;
}

RunConfig parse_config(const std::string& json_text, const NumericPolicy& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  only_keys(j, "config", {"scenario", "sweep", "figure2", "fidelity", "qfi", "output", "numeric_policy"});
  RunConfig cfg;
  cfg.policy = base;
  if (j.contains("numeric_policy")) cfg.policy = NumericPolicy::from_json(j.at("numeric_policy").dump(), base);
  cfg.scenario.n_max = cfg.policy.n_max;
  if (j.contains("scenario")) parse_scenario(j.at("scenario"), cfg);
  if (j.contains("sweep")) parse_sweep(j.at("sweep"), cfg);
  if (j.contains("figure2")) parse_figure2(j.at("figure2"), cfg);
  cfg.fidelity_first = StateSpec{cfg.scenario.r, cfg.scenario.r, std::nullopt, std::nullopt};
  cfg.fidelity_second = cfg.fidelity_first;
  if (j.contains("fidelity")) {
    const json& f = j.at("fidelity");
    only_keys(f, "fidelity", {"first", "second"});
    if (f.contains("first")) cfg.fidelity_first = parse_state(f.at("first"), "fidelity.first", cfg.scenario.r);
    if (f.contains("second")) cfg.fidelity_second = parse_state(f.at("second"), "fidelity.second", cfg.scenario.r);
  }
  if (j.contains("qfi")) {
    only_keys(j.at("qfi"), "qfi", {"numeric"});
    read(j.at("qfi"), "numeric", cfg.qfi_numeric, "qfi");
  }
  if (j.contains("output")) {
    only_keys(j.at("output"), "output", {"path", "format"});
    read(j.at("output"), "path", cfg.output_path, "output");
    read(j.at("output"), "format", cfg.format, "output");
  }
  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError(fmt::format("output format must be csv or json, got '{}'", cfg.format));
  if (!std::isfinite(cfg.acceleration_m_per_s2) || cfg.acceleration_m_per_s2 < 0)
    throw ConfigError("acceleration must be finite and non-negative");
  try {
    cfg.scenario.validate();
  } catch (const InvalidScenario& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const NumericPolicy& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

}  // namespace relmetro::cli
