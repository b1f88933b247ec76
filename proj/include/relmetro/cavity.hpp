#pragma once

#include "relmetro/bogoliubov.hpp"

#include <numbers>
#include <optional>
#include <utility>

namespace relmetro {

inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Oscillating BEC cavity driven as h(t) = h sin(ω t). SI units throughout.
struct CavityScenario {
  double length_m = 1e-6;
  double sound_speed_m_per_s = 1e-3;
  double light_speed_m_per_s = kSpeedOfLight;
  int k = 1;
  int kprime = 2;
  double r = 10.0;
  /// Drive angular frequency. Unset means the pair-creation resonance ω_k + ω_k'.
  std::optional<double> omega_rad_per_s;
  double tau_s = 30.0;
  int n_max = 50;
  double n_measurements = 1e11;
  /// ω_n = prefactor · n · c_s / L. π gives the Dirichlet spectrum.
  double spectrum_prefactor = std::numbers::pi;

  /// Throws InvalidScenario on a broken invariant.
  void validate() const;
  double drive_omega() const;
};

double mode_frequency(int n, const CavityScenario& scenario);

double h_from_acceleration(double a_m_per_s2, const CavityScenario& scenario);
double acceleration_from_h(double h, const CavityScenario& scenario);

struct StaticCoefficients {
  double alpha1 = 0.0;
  double beta1 = 0.0;
};

/// α1 = -2√(kk') / (π²(k'-k)³), β1 = 2√(kk') / (π²(k+k')³). Zero for equal parity.
StaticCoefficients static_first_order(int k, int kprime);

/// ∫₀^τ sin(ω t) e^{i Δ t} dt in closed form, stable through every resonance.
Complex sinusoidal_integral(double omega, double delta, double tau);

/// First-order series for the sinusoidal drive with G_m = e^{-i ω_m τ}.
///
/// Entry [m][n] carries the free-evolution phase of its row:
///   α1[m][n] = i e^{-iω_m τ} α1_static(n, m) (ω_m - ω_n) I(ω_m - ω_n)
///   β1[m][n] = i e^{-iω_m τ} β1_static(n, m) (ω_m + ω_n) I(ω_m + ω_n)
/// which makes Ḡα1 anti-Hermitian and Ḡβ1 symmetric.
BogoliubovSeries sinusoidal_coefficients(const CavityScenario& scenario);

/// Validated series over scenario.n_max modes.
BogoliubovSeries build_scenario_series(const CavityScenario& scenario);

/// Largest whole number of fundamental periods 2π/ω_1 not exceeding τ (at least one period).
double stroboscopic_tau(double tau, const CavityScenario& scenario);

}  // namespace relmetro
