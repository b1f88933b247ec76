#pragma once

#include "relmetro/relmetro.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace relmetro::cli {

enum ExitCode : int { kSuccess = 0, kNumericFailure = 1, kConfigError = 2 };

struct SweepSpec {
  std::string parameter = "tau";  ///< tau, r, a or omega
  double start = 0.0;
  double stop = 1.0;
  int count = 2;
  std::string spacing = "linear";  ///< linear or log
  /// Snap τ values to whole fundamental periods (only meaningful for τ).
  bool stroboscopic = false;

  std::vector<double> grid() const;
};

struct Figure2Spec {
  double tau_start_s = 0.1;
  double tau_stop_s = 100.0;
  int count = 25;
  std::vector<double> r_values = {8.0, 9.0, 10.0};
  bool stroboscopic = true;
};

struct StateSpec {
  double r_k = 0.0;
  double r_kprime = 0.0;
  /// Transform through the scenario at this acceleration before comparing.
  std::optional<double> acceleration_m_per_s2;
  std::optional<Eigen::Matrix4d> covariance;
};

struct RunConfig {
  CavityScenario scenario;
  double acceleration_m_per_s2 = 1e-10;
  std::optional<SweepSpec> sweep;
  Figure2Spec figure2;
  StateSpec fidelity_first;
  StateSpec fidelity_second;
  bool qfi_numeric = true;
  std::string output_path;
  std::string format = "csv";
  NumericPolicy policy;
};

/// Parses a JSON config. Unknown keys and malformed values raise ConfigError.
RunConfig parse_config(const std::string& json_text, const NumericPolicy& base = numeric_policy());
RunConfig load_config(const std::string& path, const NumericPolicy& base = numeric_policy());

/// One row of a qfi / sweep table.
struct SweepRecord {
  double swept = 0.0;  ///< value of the swept parameter (also present in tau_s or r)
  double tau_s = 0.0;
  double r = 0.0;
  double qfi = 0.0;
  double delta_h = 0.0;
  double delta_a_m_per_s2 = 0.0;
  double validity_margin = 0.0;
  double tail_estimate = 0.0;
};

struct Figure2Table {
  std::vector<double> tau_s;
  std::vector<double> r_values;
  std::vector<std::vector<double>> delta_a;  ///< [r index][tau index]
};

SweepRecord record_from(const ScenarioEvaluation& ev, double swept);

std::vector<SweepRecord> run_sweep(const RunConfig& cfg, int workers);
Figure2Table run_figure2(const RunConfig& cfg, int workers);

/// Column name of the extra leading column for sweeps over a or ω, empty otherwise.
std::string swept_column(const std::string& parameter);

std::string sweep_csv(const std::vector<SweepRecord>& records, const std::string& parameter);
std::string sweep_json(const std::vector<SweepRecord>& records, const std::string& parameter);
std::vector<SweepRecord> parse_sweep_csv(const std::string& csv, const std::string& parameter);
std::string figure2_csv(const Figure2Table& table);
std::string figure2_json(const Figure2Table& table);

/// Full command-line entry point. Never throws; returns 0, 1 or 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace relmetro::cli
