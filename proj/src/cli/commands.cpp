#include "relmetro_cli.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace relmetro::cli {

namespace {

// Runs f(i) for i in [0, n) on up to `workers` threads. Results are written by index, so the
// outcome does not depend on scheduling; the exception of the lowest failing index wins.
template <class F>
void parallel_for(int n, int workers, F f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(workers, 1, std::max(1, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string num(double v) { return fmt::format("{:.16e}", v); }

const char* kColumns[] = {"tau_s", "r", "qfi", "delta_h", "delta_a_m_per_s2", "validity_margin", "tail_estimate"};

std::vector<double> record_values(const SweepRecord& r) {
  return {r.tau_s, r.r, r.qfi, r.delta_h, r.delta_a_m_per_s2, r.validity_margin, r.tail_estimate};
}

std::vector<double> figure2_grid(const Figure2Spec& f, const CavityScenario& sc) {
  SweepSpec s;
  s.start = f.tau_start_s;
  s.stop = f.tau_stop_s;
  s.count = f.count;
  s.spacing = "log";
  std::vector<double> g = s.grid();
  if (f.stroboscopic) {
    for (double& t : g) t = stroboscopic_tau(t, sc);
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return g;
}

}  // namespace

std::string swept_column(const std::string& parameter) {
  if (parameter == "a") return "a_m_per_s2";
  if (parameter == "omega") return "omega_rad_per_s";
  return "";
}

SweepRecord record_from(const ScenarioEvaluation& ev, double swept) {
  SweepRecord r;
  r.swept = swept;
  r.tau_s = ev.tau_s;
  r.r = ev.r;
  r.qfi = ev.qfi_analytic;
  r.delta_h = ev.estimate.delta_h;
  r.delta_a_m_per_s2 = ev.estimate.delta_a;
  r.validity_margin = ev.estimate.validity_margin;
  r.tail_estimate = ev.tail_estimate;
  return r;
}

std::vector<SweepRecord> run_sweep(const RunConfig& cfg, int workers) {
  if (!cfg.sweep) throw ConfigError("the sweep command needs a 'sweep' section in the config");
  const SweepSpec& sw = *cfg.sweep;
  const std::vector<double> grid = sw.grid();
  std::vector<SweepRecord> out(grid.size());
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    CavityScenario sc = cfg.scenario;
    double a = cfg.acceleration_m_per_s2;
    const double v = grid[i];
    if (sw.parameter == "tau") {
      sc.tau_s = sw.stroboscopic ? stroboscopic_tau(v, sc) : v;
    } else if (sw.parameter == "r") {
      sc.r = v;
    } else if (sw.parameter == "omega") {
      sc.omega_rad_per_s = v;
    } else {
      a = v;
    }
    try {
      sc.validate();
    } catch (const InvalidScenario& e) {
      throw ConfigError(e.what());
    }
    const double swept = sw.parameter == "tau" ? sc.tau_s : v;
    out[i] = record_from(evaluate_scenario(sc, a, false, cfg.policy), swept);
  });
  return out;
}

Figure2Table run_figure2(const RunConfig& cfg, int workers) {
  Figure2Table t;
  t.tau_s = figure2_grid(cfg.figure2, cfg.scenario);
  t.r_values = cfg.figure2.r_values;
  const int nt = static_cast<int>(t.tau_s.size());
  const int nr = static_cast<int>(t.r_values.size());
  t.delta_a.assign(nr, std::vector<double>(nt));
  parallel_for(nt * nr, workers, [&](int idx) {
    const int ir = idx / nt, it = idx % nt;
    CavityScenario sc = cfg.scenario;
    sc.r = t.r_values[ir];
    sc.tau_s = t.tau_s[it];
    t.delta_a[ir][it] = evaluate_scenario(sc, cfg.acceleration_m_per_s2, false, cfg.policy).estimate.delta_a;
  });
  return t;
}

std::string sweep_csv(const std::vector<SweepRecord>& records, const std::string& parameter) {
  const std::string extra = swept_column(parameter);
  std::string s;
  if (!extra.empty()) s += extra + ",";
  for (std::size_t c = 0; c < std::size(kColumns); ++c) s += std::string(c ? "," : "") + kColumns[c];
  s += "\n";
  for (const auto& r : records) {
    if (!extra.empty()) s += num(r.swept) + ",";
    const auto v = record_values(r);
    for (std::size_t c = 0; c < v.size(); ++c) s += (c ? "," : "") + num(v[c]);
    s += "\n";
  }
  return s;
}

std::string sweep_json(const std::vector<SweepRecord>& records, const std::string& parameter) {
  const std::string extra = swept_column(parameter);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    if (!extra.empty()) o[extra] = r.swept;
    const auto v = record_values(r);
    for (std::size_t c = 0; c < v.size(); ++c) o[kColumns[c]] = v[c];
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::vector<SweepRecord> parse_sweep_csv(const std::string& csv, const std::string& parameter) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  const bool extra = !swept_column(parameter).empty();
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    const std::size_t off = extra ? 1 : 0;
    if (v.size() != std::size(kColumns) + off) throw ConfigError("CSV row has the wrong number of columns");
    SweepRecord r;
    r.tau_s = v[off];
    r.r = v[off + 1];
    r.qfi = v[off + 2];
    r.delta_h = v[off + 3];
    r.delta_a_m_per_s2 = v[off + 4];
    r.validity_margin = v[off + 5];
    r.tail_estimate = v[off + 6];
    r.swept = extra ? v[0] : (parameter == "r" ? r.r : r.tau_s);
    out.push_back(r);
  }
  return out;
}

std::string figure2_csv(const Figure2Table& t) {
  std::string s = "tau_s";
  for (double r : t.r_values) s += fmt::format(",delta_a_r{:g}_m_per_s2", r);
  s += "\n";
  for (std::size_t i = 0; i < t.tau_s.size(); ++i) {
    s += num(t.tau_s[i]);
    for (const auto& col : t.delta_a) s += "," + num(col[i]);
    s += "\n";
  }
  return s;
}

std::string figure2_json(const Figure2Table& t) {
  nlohmann::ordered_json o;
  o["tau_s"] = t.tau_s;
  o["r_values"] = t.r_values;
  o["delta_a_m_per_s2"] = t.delta_a;
  return o.dump(2) + "\n";
}

}  // namespace relmetro::cli
