#include "relmetro/cavity.hpp"

#include <fmt/format.h>

#include <cmath>

namespace relmetro {

namespace {

constexpr double kPi = std::numbers::pi;

// E(x) = ∫₀^τ e^{ixt} dt = τ e^{ixτ/2} sinc(xτ/2)
Complex exp_integral(double x, double tau) {
  const double u = 0.5 * x * tau;
  double sinc;
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    sinc = 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0);
  } else {
    sinc = std::sin(u) / u;
  }
  return tau * sinc * std::polar(1.0, u);
}

}  // namespace

void CavityScenario::validate() const {
  if (!(length_m > 0) || !std::isfinite(length_m)) throw InvalidScenario("length_m must be positive");
  if (!(sound_speed_m_per_s > 0) || !std::isfinite(sound_speed_m_per_s))
    throw InvalidScenario("sound speed must be positive");
  if (!(light_speed_m_per_s > 0)) throw InvalidScenario("light speed must be positive");
  if (!(tau_s >= 0) || !std::isfinite(tau_s)) throw InvalidScenario("tau must be non-negative");
  if (k < 1 || kprime < 1) throw InvalidScenario("mode numbers must be positive");
  if (k == kprime) throw InvalidScenario("k and k' must differ");
  if ((k - kprime) % 2 == 0) throw InvalidScenario(fmt::format("modes {} and {} have the same parity", k, kprime));
  if (n_max < std::max(k, kprime))
    throw InvalidScenario(fmt::format("n_max = {} does not cover modes {} and {}", n_max, k, kprime));
  if (!std::isfinite(r)) throw InvalidScenario("squeezing must be finite");
  if (omega_rad_per_s && !(*omega_rad_per_s >= 0)) throw InvalidScenario("drive frequency must be non-negative");
  if (!(n_measurements >= 1) || n_measurements != std::floor(n_measurements))
    throw InvalidScenario("n_measurements must be a positive integer");
  if (!(spectrum_prefactor > 0)) throw InvalidScenario("spectrum prefactor must be positive");
}

double CavityScenario::drive_omega() const {
  if (omega_rad_per_s) return *omega_rad_per_s;
  return mode_frequency(k, *this) + mode_frequency(kprime, *this);
}

double mode_frequency(int n, const CavityScenario& scenario) {
  if (n < 1) throw ModeOutOfRange(fmt::format("mode number {} must be positive", n));
  return scenario.spectrum_prefactor * n * scenario.sound_speed_m_per_s / scenario.length_m;
}

double h_from_acceleration(double a_m_per_s2, const CavityScenario& scenario) {
  return a_m_per_s2 * scenario.length_m / (scenario.sound_speed_m_per_s * scenario.sound_speed_m_per_s);
}

double acceleration_from_h(double h, const CavityScenario& scenario) {
  return h * scenario.sound_speed_m_per_s * scenario.sound_speed_m_per_s / scenario.length_m;
}

StaticCoefficients static_first_order(int k, int kprime) {
  if (k < 1 || kprime < 1) throw ModeOutOfRange("mode numbers must be positive");
  if (k == kprime) throw ModeOutOfRange("static coefficients need k != k'");
  if ((k - kprime) % 2 == 0) return {};
  const double root = std::sqrt(static_cast<double>(k) * kprime);
  const double diff = kprime - k;
  const double sum = k + kprime;
  return {-2.0 * root / (kPi * kPi * diff * diff * diff), 2.0 * root / (kPi * kPi * sum * sum * sum)};
}

Complex sinusoidal_integral(double omega, double delta, double tau) {
  // sin(ωt) = (e^{iωt} - e^{-iωt}) / 2i
  return (exp_integral(delta + omega, tau) - exp_integral(delta - omega, tau)) / Complex(0.0, 2.0);
}

BogoliubovSeries sinusoidal_coefficients(const CavityScenario& scenario) {
  const int n = scenario.n_max;
  const double tau = scenario.tau_s;
  const double omega = scenario.drive_omega();
  BogoliubovSeries s = BogoliubovSeries::trivial(n);
  std::vector<double> w(n);
  for (int m = 0; m < n; ++m) {
    w[m] = mode_frequency(m + 1, scenario);
    s.G(m) = std::polar(1.0, -w[m] * tau);
  }
  const Complex i(0.0, 1.0);
  for (int m = 0; m < n; ++m) {
    for (int q = m + 1; q < n; ++q) {
      if ((q - m) % 2 == 0) continue;
      // Generator entries A = Ḡα1, B = Ḡβ1 for the pair; the mirror entries follow from
      // anti-Hermiticity of A and symmetry of B.
      const StaticCoefficients st = static_first_order(q + 1, m + 1);
      const double diff = w[m] - w[q];
      const double sum = w[m] + w[q];
      const Complex a = i * st.alpha1 * diff * sinusoidal_integral(omega, diff, tau);
      const Complex b = i * st.beta1 * sum * sinusoidal_integral(omega, sum, tau);
      s.alpha1(m, q) = s.G(m) * a;
      s.alpha1(q, m) = s.G(q) * -std::conj(a);
      s.beta1(m, q) = s.G(m) * b;
      s.beta1(q, m) = s.G(q) * b;
    }
  }
  return s;
}

BogoliubovSeries build_scenario_series(const CavityScenario& scenario) {
  scenario.validate();
  BogoliubovSeries s = sinusoidal_coefficients(scenario);
  s.validate();
  return s;
}

double stroboscopic_tau(double tau, const CavityScenario& scenario) {
  const double period = 2.0 * kPi / mode_frequency(1, scenario);
  const double periods = std::max(1.0, std::floor(tau / period + 1e-9));
  return periods * period;
}

}  // namespace relmetro
