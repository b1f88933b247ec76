#include "relmetro/metrology.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace relmetro {

namespace {

template <class T>
using Mat4 = Eigen::Matrix<T, 4, 4>;

template <class T>
Mat4<T> as_mat4(const BasicGaussianState<T>& s, const char* which) {
  if (s.num_modes != 2) throw InvalidState(fmt::format("{} state must have two modes", which));
  return s.cov;
}

template <class T>
T det2(const Mat4<T>& m, int r, int c) {
  return m(r, c) * m(r + 1, c + 1) - m(r, c + 1) * m(r + 1, c);
}

// det(σ + iΩ) = det σ - (det A + det B + 2 det C) + 1 for σ = [[A, C], [Cᵀ, B]]
template <class T>
T uncertainty_det(const Mat4<T>& s) {
  return s.determinant() - (det2(s, 0, 0) + det2(s, 2, 2) + 2 * det2(s, 0, 2)) + 1;
}

void check_modes(int n_modes, int k, int kprime) {
  if (k < 1 || kprime < 1 || k > n_modes || kprime > n_modes || k == kprime)
    throw ModeOutOfRange(fmt::format("modes ({}, {}) invalid for a series of {} modes", k, kprime, n_modes));
}

void require_first_order(const BogoliubovSeries& s) {
  if (s.alpha1.size() == 0 || s.beta1.size() == 0) throw MissingFirstOrder("series has no first-order coefficients");
  if (s.alpha1.rows() != s.n_modes || s.beta1.rows() != s.n_modes || s.G.size() != s.n_modes)
    throw MissingFirstOrder("first-order coefficients do not cover the truncation");
}

double printed_form(const BogoliubovSeries& s, double r, double phik, double phikp, int k, int kprime,
                    const ModeSums& ms) {
  const int K = k - 1, Kp = kprime - 1;
  const Complex a = s.alpha1(K, Kp), b = s.beta1(K, Kp);
  const Complex ar = s.alpha1(Kp, K), br = s.beta1(Kp, K);
  const Complex Gk = s.G(K), Gkp = s.G(Kp);
  const double ch = std::cosh(r), sh = std::sinh(r), s2 = std::sinh(2 * r);
  const double A2 = std::norm(a), B2 = std::norm(b);
  const double fak = ms.f_alpha_k, fbk = ms.f_beta_k, fakp = ms.f_alpha_kprime, fbkp = ms.f_beta_kprime;
  const Complex cgkp2 = std::conj(Gkp) * std::conj(Gkp);
  const Complex gkp2 = Gkp * Gkp;
  Complex t = 4 * ch * (fak + fbk + fakp + fbkp) + 4 * ch * ch * (A2 + B2) - 4 * std::pow(ch, 4) * B2;
  t -= 4 * sh * sh * (cgkp2 * a * a + gkp2 * b * b - fak + fbk - fakp + fbkp - A2 + B2);
  t -= 2 * s2 *
       (2.0 * a * b + 2.0 * ar * br - std::cos(phik) * (-fak + fbk - A2 / 2 + B2 / 2) -
        std::cos(phikp) * (-fakp + fbkp - A2 / 2 + B2 / 2));
  t += 4 * sh * (std::conj(Gk) * std::conj(Gk) * ms.G_alphabeta_kk + cgkp2 * ms.G_alphabeta_kprimekprime);
  t += 4 * s2 * ch * ch * (a * b + ar * br);
  t += 2 * std::pow(sh, 4) * (A2 - B2 - cgkp2 * a * a - gkp2 * b * b);
  t -= 0.5 * s2 * s2 * (A2 - 3 * B2 - cgkp2 * a * a - gkp2 * b * b);
  return t.real();
}

double rederived_form(const BogoliubovSeries& s, double r, int k, int kprime) {
  const int K = k - 1, Kp = kprime - 1;
  const Complex gbar = std::conj(s.G(K));
  const Complex a = gbar * s.alpha1(K, Kp), b = gbar * s.beta1(K, Kp);
  const double ai = a.imag(), bi = b.imag(), br = b.real();
  const double ep = std::exp(2 * r), em = std::exp(-2 * r);
  double h = ep * ep * (ai - bi) * (ai - bi) + em * em * (ai + bi) * (ai + bi) - 2 * ai * ai + 2 * bi * bi +
             4 * br * br;
  // Per spectator column: 4sinh²r f_α + 4cosh²r f_β - 4sinh2r Re𝒢, regrouped so that the
  // e^{2r} and e^{-2r} parts are sums of squares.
  for (int i : {K, Kp}) {
    double minus = 0, plus = 0, fa = 0, fb = 0;
    for (int n = 0; n < s.n_modes; ++n) {
      if (n == K || n == Kp) continue;
      const Complex al = s.alpha1(n, i), be = s.beta1(n, i);
      minus += std::norm(al - be);
      plus += std::norm(al + be);
      fa += std::norm(al);
      fb += std::norm(be);
    }
    h += ep * minus + em * plus + 2 * (fb - fa);
  }
  return h;
}

}  // namespace

template <class T>
BasicFidelityBreakdown<T> fidelity_two_mode(const BasicGaussianState<T>& s1, const BasicGaussianState<T>& s2,
                                            const NumericPolicy& policy) {
  using std::sqrt;
  if (!s1.has_zero_moments() || !s2.has_zero_moments())
    throw UnsupportedRegime("the two-mode fidelity formula requires zero first moments");
  const Mat4<T> a = as_mat4(s1, "first");
  const Mat4<T> b = as_mat4(s2, "second");
  Mat4<T> om = Mat4<T>::Zero();
  om(0, 1) = om(2, 3) = T(1);
  om(1, 0) = om(3, 2) = T(-1);

  BasicFidelityBreakdown<T> f;
  f.Gamma = (om * a * om * b - Mat4<T>::Identity()).determinant() / 16;
  f.Lambda1 = uncertainty_det(a) / 4;
  f.Lambda2 = uncertainty_det(b) / 4;
  f.Delta = (a + b).determinant() / 16;
  if (f.Gamma < 0) {
    if (f.Gamma < -T(policy.branch_clamp)) throw ConditioningError(fmt::format("Γ = {} is negative", to_double(f.Gamma)));
    f.Gamma = 0;
  }
  const T lam = f.Lambda1 * f.Lambda2;
  f.Pi = sqrt(f.Gamma) + (lam > 0 ? sqrt(lam) : T(0));
  T disc = f.Pi * f.Pi - f.Delta;
  if (disc < 0) {
    const T scale = std::max<T>(T(1), f.Pi * f.Pi);
    if (disc < -T(policy.branch_clamp) * scale)
      throw ConditioningError(fmt::format("Π² - Δ = {} is below the clamp", to_double(disc)));
    disc = 0;
  }
  if (!(f.Delta > 0)) throw ConditioningError(fmt::format("Δ = {} is not positive", to_double(f.Delta)));
  // 1/(Π - √(Π² - Δ)) rewritten without the cancellation; both roots coincide when either state is pure.
  f.fidelity = (f.Pi + sqrt(disc)) / f.Delta;
  if (s1.cov == s2.cov) f.fidelity = T(1);
  return f;
}

FidelityBreakdown to_double(const BasicFidelityBreakdown<Precise>& f) {
  return {to_double(f.Gamma), to_double(f.Lambda1), to_double(f.Lambda2),
          to_double(f.Delta), to_double(f.Pi),      to_double(f.fidelity)};
}

StepPolicy StepPolicy::from(const NumericPolicy& policy) {
  StepPolicy s;
  s.ladder = policy.dh_ladder;
  s.plateau_rel = policy.plateau_rel;
  return s;
}

template <class T>
QfiNumericResult qfi_numeric(const StateMap<T>& state_at, double h, const StepPolicy& policy) {
  using std::sqrt;
  if (policy.ladder.size() < 3) throw ConfigError("step ladder needs at least three entries");
  const BasicGaussianState<T> base = state_at(T(h));
  auto raw_at = [&](double dh) -> T {
    const auto f = fidelity_two_mode(base, state_at(T(h) + T(dh)));
    return 8 * (1 - sqrt(f.fidelity));
  };

  QfiNumericResult res;
  double scale = std::max(h, 1.0);
  for (int iter = 0; iter < 80; ++iter) {
    const double dh = policy.ladder.front() * scale;
    const double x = to_double(raw_at(dh));
    if (!(x > policy.max_infidelity)) break;
    // x ≈ H dh² while quadratic; near saturation (x → 8) the estimate is only a lower bound.
    const double shrink = x > 1e-2 ? 1e-2 : 0.5 * std::sqrt(policy.max_infidelity / x);
    scale *= shrink;
  }

  for (double base_step : policy.ladder) {
    const double dh = base_step * scale;
    res.steps.push_back(dh);
    res.raw.push_back(to_double(raw_at(dh) / (T(dh) * T(dh))));
  }
  const std::size_t n = res.steps.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double q = res.steps[i] / res.steps[i + 1];
    res.richardson1.push_back((q * res.raw[i + 1] - res.raw[i]) / (q - 1));
  }
  const double r1a = res.richardson1[res.richardson1.size() - 2];
  const double r1b = res.richardson1.back();
  const double q = res.steps[n - 2] / res.steps[n - 1];
  const double r2 = (q * q * r1b - r1a) / (q * q - 1);

  const double mag = std::max(std::abs(r1a), std::abs(r1b));
  res.spread = mag > 0 ? std::abs(r1b - r1a) / mag : 0.0;
  if (!(res.spread <= policy.plateau_rel)) {
    std::vector<double> all = res.raw;
    all.insert(all.end(), res.richardson1.begin(), res.richardson1.end());
    throw NoPlateau(fmt::format("QFI ladder did not settle: extrapolants {:.6e} and {:.6e} differ by {:.2e} relative",
                                r1a, r1b, res.spread),
                    res.steps, all);
  }
  res.value = std::max(r2, 0.0);
  return res;
}

ModeSums mode_sums(const BogoliubovSeries& series, int k, int kprime) {
  require_first_order(series);
  check_modes(series.n_modes, k, kprime);
  const int K = k - 1, Kp = kprime - 1;
  const int N = series.n_modes;
  ModeSums ms;
  double envelope = 0.0;
  for (int n = 0; n < N; ++n) {
    if (n == K || n == Kp) continue;
    double term = 0.0;
    for (int i : {K, Kp}) {
      const Complex al = series.alpha1(n, i), be = series.beta1(n, i);
      const double fa = std::norm(al), fb = std::norm(be);
      const Complex g = al * std::conj(be);
      if (i == K) {
        ms.f_alpha_k += fa;
        ms.f_beta_k += fb;
        ms.G_alphabeta_kk += g;
      } else {
        ms.f_alpha_kprime += fa;
        ms.f_beta_kprime += fb;
        ms.G_alphabeta_kprimekprime += g;
      }
      term = std::max({term, fa, fb, std::abs(g)});
    }
    const double mode = n + 1;
    if (2 * (n + 1) > N) envelope = std::max(envelope, term * std::pow(mode, 4));
  }
  ms.tail_estimate = envelope / (3.0 * std::pow(static_cast<double>(N), 3));
  return ms;
}

double qfi_analytic_h0(const BogoliubovSeries& series, double r, double phi_k, double phi_kprime, int k, int kprime,
                       AnalyticForm form) {
  require_first_order(series);
  check_modes(series.n_modes, k, kprime);
  if (form == AnalyticForm::rederived) return rederived_form(series, r, k, kprime);
  return printed_form(series, r, phi_k, phi_kprime, k, kprime, mode_sums(series, k, kprime));
}

EstimationResult cramer_rao(double qfi, double n_measurements, double length_m, double sound_speed_m_per_s) {
  if (!(qfi > 0)) throw NoInformation(fmt::format("quantum Fisher information {} carries no information", qfi));
  if (!(n_measurements >= 1)) throw InvalidScenario("need at least one measurement");
  EstimationResult e;
  e.qfi = qfi;
  e.n_measurements = n_measurements;
  e.delta_h = 1.0 / std::sqrt(n_measurements * qfi);
  e.delta_a = e.delta_h * sound_speed_m_per_s * sound_speed_m_per_s / length_m;
  return e;
}

ValidityReport validity_check(double qfi_h0, double h, double threshold) {
  ValidityReport v;
  v.margin = qfi_h0 * h * h;
  v.valid = v.margin < threshold;
  return v;
}

double mach_zehnder_qfi(double k_wave, double T) {
  const double phase = k_wave * T * T;
  return phase * phase;
}

double mach_zehnder_bound(double k_wave, double T, double n_measurements) {
  return 1.0 / (std::sqrt(n_measurements) * k_wave * T * T);
}

PhaseCalibration calibrate_phases(const BogoliubovSeries& series, int k, int kprime,
                                  const std::vector<PhaseSample>& samples, int grid) {
  require_first_order(series);
  check_modes(series.n_modes, k, kprime);
  if (samples.empty()) throw InvalidState("phase calibration needs at least one sample");
  if (grid < 4) grid = 4;
  const ModeSums ms = mode_sums(series, k, kprime);
  auto cost = [&](double pk, double pkp) {
    double worst = 0.0;
    for (const auto& s : samples) {
      const double v = printed_form(series, s.r, pk, pkp, k, kprime, ms);
      const double denom = std::abs(s.target_qfi) > 0 ? std::abs(s.target_qfi) : 1.0;
      worst = std::max(worst, std::abs(v - s.target_qfi) / denom);
    }
    return worst;
  };
  const double two_pi = 2 * std::numbers::pi;
  PhaseCalibration best{0.0, 0.0, cost(0.0, 0.0)};
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double pk = two_pi * i / grid, pkp = two_pi * j / grid;
      const double c = cost(pk, pkp);
      if (c < best.max_rel_residual) best = {pk, pkp, c};
    }
  }
  double step = two_pi / grid;
  while (step > 1e-9) {
    bool moved = false;
    for (auto [dx, dy] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const double pk = best.phi_k + dx * step, pkp = best.phi_kprime + dy * step;
      const double c = cost(pk, pkp);
      if (c < best.max_rel_residual) {
        best = {pk, pkp, c};
        moved = true;
      }
    }
    if (!moved) step /= 2;
  }
  best.phi_k = std::fmod(std::fmod(best.phi_k, two_pi) + two_pi, two_pi);
  best.phi_kprime = std::fmod(std::fmod(best.phi_kprime, two_pi) + two_pi, two_pi);
  return best;
}

template BasicFidelityBreakdown<double> fidelity_two_mode<double>(const GaussianState&, const GaussianState&,
                                                                  const NumericPolicy&);
template BasicFidelityBreakdown<Precise> fidelity_two_mode<Precise>(const PreciseGaussianState&,
                                                                    const PreciseGaussianState&, const NumericPolicy&);
template QfiNumericResult qfi_numeric<double>(const StateMap<double>&, double, const StepPolicy&);
template QfiNumericResult qfi_numeric<Precise>(const StateMap<Precise>&, double, const StepPolicy&);

}  // namespace relmetro
