#pragma once

#include "relmetro/bogoliubov.hpp"
#include "relmetro/gaussian.hpp"

#include <functional>
#include <vector>

namespace relmetro {

/// Terms of the two-mode Gaussian fidelity
///   Γ = det(Ωσ₁Ωσ₂ - 1)/16, Λᵢ = det(σᵢ + iΩ)/4, Δ = det(σ₁ + σ₂)/16,
///   Π = √Γ + √(Λ₁Λ₂), ℱ = 1/(Π - √(Π² - Δ)).
/// The other root, 1/(Π + √(Π² - Δ)), agrees only when one of the states is pure; for two mixed
/// states it gives ℱ(σ, σ) = 1/det σ.
template <class T>
struct BasicFidelityBreakdown {
  T Gamma{};
  T Lambda1{};
  T Lambda2{};
  T Delta{};
  T Pi{};
  T fidelity{};
};

using FidelityBreakdown = BasicFidelityBreakdown<double>;

/// Both states must have zero first moments (UnsupportedRegime otherwise).
/// Π² - Δ below -branch_clamp·max(1, Π²) raises ConditioningError.
template <class T>
BasicFidelityBreakdown<T> fidelity_two_mode(const BasicGaussianState<T>& s1, const BasicGaussianState<T>& s2,
                                            const NumericPolicy& policy = numeric_policy());

FidelityBreakdown to_double(const BasicFidelityBreakdown<Precise>& f);

struct StepPolicy {
  std::vector<double> ladder = {1e-4, 5e-5, 2.5e-5};
  double plateau_rel = 1e-3;
  /// Shrink the ladder until H·dh² is at most this, so 1 - √ℱ stays in its quadratic regime.
  double max_infidelity = 1e-6;

  static StepPolicy from(const NumericPolicy& policy);
};

struct QfiNumericResult {
  double value = 0.0;
  std::vector<double> steps;
  std::vector<double> raw;          ///< 8(1 - √ℱ)/dh² per step
  std::vector<double> richardson1;  ///< first-level extrapolants
  double spread = 0.0;              ///< relative disagreement of the first-level extrapolants
};

template <class T>
using StateMap = std::function<BasicGaussianState<T>(const T& h)>;

/// H(h) from 8[1 - √ℱ(σ(h), σ(h+dh))]/dh² on a halving ladder with two-level Richardson
/// extrapolation (the one-sided difference has an O(dh) leading error). Throws NoPlateau
/// when the first-level extrapolants disagree by more than plateau_rel.
template <class T>
QfiNumericResult qfi_numeric(const StateMap<T>& state_at, double h, const StepPolicy& steps = StepPolicy{});

struct ModeSums {
  double f_alpha_k = 0.0;
  double f_beta_k = 0.0;
  double f_alpha_kprime = 0.0;
  double f_beta_kprime = 0.0;
  Complex G_alphabeta_kk{};
  Complex G_alphabeta_kprimekprime{};
  /// Conservative bound on each sum's omitted tail n > n_modes (assumes at least n⁻⁴ decay).
  double tail_estimate = 0.0;
};

/// f_α^i = Σ_{n∉{k,k'}} |α1_{ni}|², f_β^i likewise, 𝒢_ii = Σ_{n∉{k,k'}} α1_{ni} (β1_{ni})*.
ModeSums mode_sums(const BogoliubovSeries& series, int k, int kprime);

enum class AnalyticForm {
  /// Closed form obtained from the quadratic-generator expansion of the fidelity; agrees
  /// with qfi_numeric and has no φ dependence.
  rederived,
  /// The long closed form transcribed term by term, with φ_k and φ_k' as free inputs.
  as_printed,
};

/// H⁽⁰⁾ for two equally squeezed modes k, k'. Throws MissingFirstOrder when the series
/// carries no first-order matrices.
double qfi_analytic_h0(const BogoliubovSeries& series, double r, double phi_k, double phi_kprime, int k, int kprime,
                       AnalyticForm form = AnalyticForm::rederived);

struct EstimationResult {
  double qfi = 0.0;
  bool qfi_valid = true;
  double validity_margin = 0.0;
  double delta_h = 0.0;
  double delta_a = 0.0;
  double n_measurements = 1.0;
};

/// Δh = 1/√(N·H), Δa = Δh·c_s²/L. Throws NoInformation for H ≤ 0.
EstimationResult cramer_rao(double qfi, double n_measurements, double length_m, double sound_speed_m_per_s);

struct ValidityReport {
  bool valid = true;
  double margin = 0.0;  ///< H⁽⁰⁾h²
};

ValidityReport validity_check(double qfi_h0, double h, double threshold = numeric_policy().validity_threshold);

/// (k T²)²
double mach_zehnder_qfi(double k_wave, double T);
/// 1/(√N k T²)
double mach_zehnder_bound(double k_wave, double T, double n_measurements);

struct PhaseSample {
  double r = 0.0;
  double target_qfi = 0.0;
};

struct PhaseCalibration {
  double phi_k = 0.0;
  double phi_kprime = 0.0;
  double max_rel_residual = 0.0;
};

/// Grid search (then local refinement) of φ_k, φ_k' minimizing the largest relative
/// residual of the as-printed form against the supplied reference values.
PhaseCalibration calibrate_phases(const BogoliubovSeries& series, int k, int kprime,
                                  const std::vector<PhaseSample>& samples, int grid = 72);

}  // namespace relmetro
