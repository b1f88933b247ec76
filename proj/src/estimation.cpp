#include "relmetro/estimation.hpp"

#include <cmath>

namespace relmetro {

ScenarioModel::ScenarioModel(const CavityScenario& scenario)
    : scenario_(scenario),
      series_(build_scenario_series(scenario)),
      completed_(complete_second_order(series_)),
      initial_(initial_product_squeezed<Precise>(scenario.r, scenario.r)),
      rows_(completed_, scenario.k, scenario.kprime) {}

PreciseGaussianState ScenarioModel::state_at(const Precise& h) const { return transform_reduced(initial_, rows_, h); }

StateMap<Precise> ScenarioModel::state_map() const {
  return [this](const Precise& h) { return state_at(h); };
}

double ScenarioModel::qfi_analytic(AnalyticForm form, double phi_k, double phi_kprime) const {
  return qfi_analytic_h0(series_, scenario_.r, phi_k, phi_kprime, scenario_.k, scenario_.kprime, form);
}

QfiNumericResult ScenarioModel::qfi_numeric(double h, const StepPolicy& steps) const {
  return relmetro::qfi_numeric<Precise>(state_map(), h, steps);
}

ModeSums ScenarioModel::mode_sums() const { return relmetro::mode_sums(series_, scenario_.k, scenario_.kprime); }

ScenarioEvaluation evaluate_scenario(const CavityScenario& scenario, double acceleration_m_per_s2, bool with_numeric,
                                     const NumericPolicy& policy) {
  const ScenarioModel model(scenario);
  ScenarioEvaluation ev;
  ev.tau_s = scenario.tau_s;
  ev.r = scenario.r;
  ev.acceleration_m_per_s2 = acceleration_m_per_s2;
  ev.h = h_from_acceleration(acceleration_m_per_s2, scenario);
  ev.qfi_analytic = model.qfi_analytic();
  ev.tail_estimate = model.mode_sums().tail_estimate;
  if (with_numeric) ev.qfi_numeric = model.qfi_numeric(0.0, StepPolicy::from(policy)).value;

  ev.estimate = cramer_rao(ev.qfi_analytic, scenario.n_measurements, scenario.length_m, scenario.sound_speed_m_per_s);
  const ValidityReport v = validity_check(ev.qfi_analytic, ev.h, policy.validity_threshold);
  ev.estimate.qfi_valid = v.valid;
  ev.estimate.validity_margin = v.margin;
  ev.validity_edge_a = acceleration_from_h(1.0 / std::sqrt(ev.qfi_analytic), scenario);
  return ev;
}

}  // namespace relmetro
