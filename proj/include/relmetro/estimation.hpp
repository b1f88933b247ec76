#pragma once

#include "relmetro/cavity.hpp"
#include "relmetro/metrology.hpp"

#include <optional>

namespace relmetro {

/// Cavity scenario wired into the metrology pipeline: the map h ↦ σ̃_kk'(h) in extended
/// precision, together with the analytic H⁽⁰⁾ of its series.
class ScenarioModel {
 public:
  explicit ScenarioModel(const CavityScenario& scenario);

  const CavityScenario& scenario() const { return scenario_; }
  /// First-order series as built from the scenario.
  const BogoliubovSeries& series() const { return series_; }
  /// Same series with the group-completed second order used by the numeric QFI.
  const BogoliubovSeries& completed_series() const { return completed_; }

  PreciseGaussianState state_at(const Precise& h) const;
  StateMap<Precise> state_map() const;

  double qfi_analytic(AnalyticForm form = AnalyticForm::rederived, double phi_k = 0.0, double phi_kprime = 0.0) const;
  QfiNumericResult qfi_numeric(double h = 0.0, const StepPolicy& steps = StepPolicy{}) const;
  ModeSums mode_sums() const;

 private:
  CavityScenario scenario_;
  BogoliubovSeries series_;
  BogoliubovSeries completed_;
  PreciseGaussianState initial_;
  ReducedRows<Precise> rows_;
};

struct ScenarioEvaluation {
  double tau_s = 0.0;
  double r = 0.0;
  double acceleration_m_per_s2 = 0.0;
  double h = 0.0;
  double qfi_analytic = 0.0;
  std::optional<double> qfi_numeric;
  EstimationResult estimate;
  double tail_estimate = 0.0;
  /// Acceleration at which H⁽⁰⁾h² reaches 1, the edge of the perturbative domain.
  double validity_edge_a = 0.0;
};

/// Analytic H⁽⁰⁾ drives the bounds; the numeric QFI at h = 0 is added on request.
/// Throws NoInformation when H⁽⁰⁾ vanishes.
ScenarioEvaluation evaluate_scenario(const CavityScenario& scenario, double acceleration_m_per_s2,
                                     bool with_numeric = false, const NumericPolicy& policy = numeric_policy());

}  // namespace relmetro
