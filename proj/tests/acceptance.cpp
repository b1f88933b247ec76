// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits nonzero on any failure.
#include "relmetro/relmetro.hpp"
#include "relmetro_cli.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace relmetro;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("threw: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  fmt::print("[{}] criterion {}: {} ({}; {:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail, secs);
  std::fflush(stdout);
}

void note(const std::string& text) { fmt::print("       {}\n", text); }

Eigen::Matrix4d random_two_mode_symplectic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi), sq(-1.5, 1.5);
  Eigen::Matrix4d s = Eigen::Matrix4d::Identity();
  for (int layer = 0; layer < 2; ++layer) {
    Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
    for (int m = 0; m < 2; ++m) {
      const double th = ang(rng), z = sq(rng);
      Eigen::Matrix2d rot, sqz;
      rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
      sqz << std::exp(-z), 0, 0, std::exp(z);
      l.block<2, 2>(2 * m, 2 * m) = sqz * rot;
    }
    const double t = ang(rng);
    Eigen::Matrix4d bs = Eigen::Matrix4d::Zero();
    bs.block<2, 2>(0, 0) = bs.block<2, 2>(2, 2) = std::cos(t) * Eigen::Matrix2d::Identity();
    bs.block<2, 2>(0, 2) = std::sin(t) * Eigen::Matrix2d::Identity();
    bs.block<2, 2>(2, 0) = -std::sin(t) * Eigen::Matrix2d::Identity();
    s = bs * l * s;
  }
  return s;
}

PreciseGaussianState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> nu(1.0, 5.0);
  std::bernoulli_distribution pure(0.5);
  const Eigen::Matrix4d s = random_two_mode_symplectic(rng);
  Eigen::Vector4d d = Eigen::Vector4d::Ones();
  if (!pure(rng)) {
    const double a = nu(rng), b = nu(rng);
    d << a, a, b, b;
  }
  const Matrix<Precise> sp = s.cast<Precise>();
  Matrix<Precise> cov = sp * Matrix<Precise>(d.cast<Precise>().asDiagonal()) * sp.transpose();
  cov = (cov + cov.transpose().eval()) / 2;
  return PreciseGaussianState(cov);
}

// |⟨0|S(r)|0⟩|² from Fock amplitudes. The squeezed vacuum is annihilated by a·cosh r + a†·sinh r,
// which fixes c_{n+1} = -tanh r·√(n/(n+1))·c_{n-1}. Amplitudes up to photon number 60 are summed
// for the norm and the truncated tail is closed with Levin's u-transform.
Precise fock_vacuum_overlap(double r_in, int max_photons = 60) {
  const Precise r(r_in), t = tanh(r);
  std::vector<Precise> c(max_photons + 1, Precise(0));
  c[0] = 1;
  for (int n = 1; n < max_photons; ++n) c[n + 1] = -t * sqrt(Precise(n) / (n + 1)) * c[n - 1];
  std::vector<Precise> terms;
  for (int n = 0; n <= max_photons; n += 2) terms.push_back(c[n] * c[n]);
  const int k = static_cast<int>(terms.size()) - 1;
  Precise partial = 0, num = 0, den = 0;
  for (int j = 0; j <= k; ++j) {
    partial += terms[j];
    Precise binom = 1;
    for (int i = 0; i < j; ++i) binom = binom * (k - i) / (i + 1);
    const Precise w = (j % 2 ? -1 : 1) * binom * pow(Precise(j + 1) / (k + 1), k - 1) / (terms[j] * (j + 1));
    num += w * partial;
    den += w;
  }
  const Precise norm = num / den;  // Σ |c_n/c_0|²
  return 1 / norm;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

CavityScenario headline() { return CavityScenario{}; }

}  // namespace

int main() {
  fmt::print("relmetro acceptance run\n");

  criterion(1, "fidelity self-consistency over 200 random states", [] {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    double self = 0, sym = 0;
    PreciseGaussianState prev = random_state(rng);
    for (int i = 0; i < 200; ++i) {
      const PreciseGaussianState s = random_state(rng);
      // Round-trip through a passive rotation so the copy differs from s by roundoff only and the
      // comparison runs through the full formula.
      Matrix<Precise> rot = Matrix<Precise>::Zero(4, 4);
      for (int m = 0; m < 2; ++m) {
        const Precise th(ang(rng));
        rot.block(2 * m, 2 * m, 2, 2) << cos(th), sin(th), -sin(th), cos(th);
      }
      Matrix<Precise> there = rot * s.cov * rot.transpose();
      Matrix<Precise> back = rot.transpose() * there * rot;
      back = (back + back.transpose().eval()) / 2;
      const PreciseGaussianState copy(back);
      self = std::max(self, std::abs(to_double(fidelity_two_mode(s, copy).fidelity) - 1));
      const double ab = to_double(fidelity_two_mode(s, prev).fidelity);
      const double ba = to_double(fidelity_two_mode(prev, s).fidelity);
      sym = std::max(sym, std::abs(ab - ba));
      prev = s;
    }
    return Outcome{self <= 1e-10 && sym <= 1e-10, fmt::format("max |F(s,s)-1| = {:.2e}, max asymmetry = {:.2e}", self, sym)};
  });

  criterion(2, "pure-state overlap against a Fock-basis oracle", [] {
    double worst = 0;
    const auto vac = PreciseGaussianState::vacuum(2);
    for (double r : {0.1, 0.5, 1.0, 2.0}) {
      const Precise one = fock_vacuum_overlap(r);
      const double oracle = to_double(one * one);
      const double f = to_double(fidelity_two_mode(vac, initial_product_squeezed<Precise>(r, r)).fidelity);
      worst = std::max(worst, std::abs(f / oracle - 1));
    }
    return Outcome{worst <= 1e-8, fmt::format("max relative deviation {:.2e}", worst)};
  });

  criterion(3, "reduced transform equals the full oracle on 200 scenario draws", [] {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> nmax(4, 24), kdist(1, 3);
    std::uniform_real_distribution<double> rdist(0.0, 10.0), taudist(1e-3, 5.0), frac(0.01, 1.0), detune(0.5, 1.5);
    std::bernoulli_distribution resonant(0.7);
    double worst = 0;
    for (int draw = 0; draw < 200; ++draw) {
      CavityScenario sc;
      sc.n_max = nmax(rng);
      sc.k = kdist(rng);
      do {
        sc.kprime = sc.k + 1 + 2 * std::uniform_int_distribution<int>(0, 1)(rng);
      } while (sc.kprime > sc.n_max);
      sc.r = rdist(rng);
      sc.tau_s = taudist(rng);
      if (!resonant(rng)) sc.omega_rad_per_s = detune(rng) * (mode_frequency(sc.k, sc) + mode_frequency(sc.kprime, sc));
      const BogoliubovSeries first = build_scenario_series(sc);
      const BogoliubovSeries series = complete_second_order(first);
      // Stay inside the perturbative domain: H⁽⁰⁾h² below the validity threshold.
      const double H = qfi_analytic_h0(first, sc.r, 0, 0, sc.k, sc.kprime);
      const double h = frac(rng) * std::sqrt(numeric_policy().validity_threshold / std::max(H, 1e-300));
      const double h_cap = std::min(h, 1e-2);
      const auto in = initial_product_squeezed<Precise>(sc.r, sc.r);
      const auto fast = transform_reduced<Precise>(in, series, Precise(h_cap), sc.k, sc.kprime);
      const auto slow = transform_full_oracle<Precise>(in, series, Precise(h_cap), sc.k, sc.kprime);
      worst = std::max(worst, to_double((fast.cov - slow.cov).cwiseAbs().maxCoeff()));
    }
    return Outcome{worst <= 1e-10, fmt::format("max entry difference {:.2e}", worst)};
  });

  criterion(4, "analytic and numeric QFI agree on the r x tau grid", [] {
    double worst = 0;
    std::vector<PhaseSample> samples_by_tau[3];
    const double taus[] = {0.0137, 0.25, 1.3};
    for (int it = 0; it < 3; ++it) {
      for (double r : {0.0, 0.5, 1.0, 2.0}) {
        CavityScenario sc;
        sc.r = r;
        sc.tau_s = taus[it];
        const ScenarioModel m(sc);
        const double numeric = m.qfi_numeric().value;
        const double analytic = m.qfi_analytic();
        worst = std::max(worst, std::abs(analytic / numeric - 1));
        samples_by_tau[it].push_back({r, numeric});
      }
    }
    // The transcribed closed form has free phases; report how close the best phases get.
    double printed_worst = 0;
    for (int it = 0; it < 3; ++it) {
      CavityScenario sc;
      sc.tau_s = taus[it];
      const PhaseCalibration cal = calibrate_phases(build_scenario_series(sc), 1, 2, samples_by_tau[it], 36);
      printed_worst = std::max(printed_worst, cal.max_rel_residual);
    }
    note(fmt::format("as-printed form after phase calibration: max relative residual {:.3g}", printed_worst));
    return Outcome{worst <= 1e-2, fmt::format("re-derived form, max relative deviation {:.2e}", worst)};
  });

  const ScenarioEvaluation head = evaluate_scenario(headline(), 1e-10, true);

  criterion(5, "headline QFI within an order of magnitude of 1e16", [&] {
    const double a = head.qfi_analytic, n = head.qfi_numeric.value_or(0);
    const bool ok = a >= 1e15 && a <= 1e17 && n >= 1e15 && n <= 1e17;
    return Outcome{ok, fmt::format("tau = {} s: analytic {:.4e}, numeric {:.4e}", head.tau_s, a, n)};
  });

  criterion(6, "acceleration bound with N = 1e11", [&] {
    const double d = head.estimate.delta_a;
    return Outcome{d >= 1e-14 && d <= 3e-13, fmt::format("delta_a = {:.4e} m/s^2", d)};
  });

  criterion(7, "Mach-Zehnder baseline and QFI advantage", [&] {
    const double mz = mach_zehnder_qfi(1.6e7, 1);
    const double ratio = head.qfi_analytic / mz;
    note(fmt::format("Mach-Zehnder bound with N = 1e11: {:.3e} m/s^2", mach_zehnder_bound(1.6e7, 1, 1e11)));
    return Outcome{mz == 2.56e14 && ratio >= 10, fmt::format("H_MZ = {:.6e}, cavity/MZ ratio {:.1f}", mz, ratio)};
  });

  criterion(8, "figure 2 curve properties", [] {
    cli::RunConfig cfg = cli::parse_config("{}");
    const cli::Figure2Table t = cli::run_figure2(cfg, 4);
    bool decreasing = true, ordered = true;
    for (const auto& col : t.delta_a)
      for (std::size_t i = 1; i < col.size(); ++i) decreasing &= col[i] < col[i - 1];
    for (std::size_t i = 0; i < t.tau_s.size(); ++i)
      for (std::size_t j = 1; j < t.r_values.size(); ++j) ordered &= t.delta_a[j][i] < t.delta_a[j - 1][i];
    double worst_slope = 0;
    for (const auto& col : t.delta_a) {
      std::vector<double> x, y;
      for (std::size_t i = 0; i < t.tau_s.size(); ++i) {
        if (t.tau_s[i] < 10) continue;
        x.push_back(std::log(t.tau_s[i]));
        y.push_back(std::log(col[i]));
      }
      worst_slope = std::max(worst_slope, std::abs(fit_slope(x, y) + 1));
    }
    return Outcome{decreasing && ordered && worst_slope <= 0.05,
                   fmt::format("{} tau points, decreasing {}, ordered {}, max |slope + 1| = {:.2e}", t.tau_s.size(),
                               decreasing, ordered, worst_slope)};
  });

  criterion(9, "resonant growth law and closed-form integral", [] {
    CavityScenario sc;
    sc.n_max = 4;
    std::vector<double> x, y;
    for (int i = 0; i <= 90; ++i) {
      sc.tau_s = 0.1 + 0.0099 * i;  // deliberately off the 2 ms drive period
      x.push_back(sc.tau_s);
      y.push_back(std::abs(build_scenario_series(sc).beta1(0, 1)));
    }
    const double expect =
        (mode_frequency(1, sc) + mode_frequency(2, sc)) * std::abs(static_first_order(1, 2).beta1) / 2;
    const double slope_err = std::abs(fit_slope(x, y) / expect - 1);

    using boost::math::quadrature::gauss_kronrod;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> wdist(0.0, 2 * std::numbers::pi * 3000), tdist(0.0, 1.0), u(-1, 1);
    std::uniform_int_distribution<int> mode(1, 6);
    double quad_err = 0;
    for (int i = 0; i < 100; ++i) {
      const double tau = tdist(rng);
      const double w = wdist(rng);
      // Half the draws probe detunings at or next to resonance with the drive.
      const double delta = i % 2 ? mode_frequency(mode(rng), sc) + mode_frequency(mode(rng), sc) : w * (1 + 1e-9 * u(rng));
      auto re = [&](double t) { return std::sin(w * t) * std::cos(delta * t); };
      auto im = [&](double t) { return std::sin(w * t) * std::sin(delta * t); };
      const Complex q(gauss_kronrod<double, 61>::integrate(re, 0.0, tau, 15, 1e-12),
                      gauss_kronrod<double, 61>::integrate(im, 0.0, tau, 15, 1e-12));
      quad_err = std::max(quad_err, std::abs(sinusoidal_integral(w, delta, tau) - q));
    }
    return Outcome{slope_err <= 1e-3 && quad_err <= 1e-10,
                   fmt::format("slope relative error {:.2e}, max |closed form - quadrature| = {:.2e}", slope_err, quad_err)};
  });

  criterion(10, "symplectic defect scales as h^2", [] {
    CavityScenario sc;
    sc.tau_s = 0.0137;
    sc.n_max = 20;
    const BogoliubovSeries s = build_scenario_series(sc);
    const double h = 1e-3;
    const double d1 = assemble_symplectic(evaluate_series(s, h)).defect();
    const double d2 = assemble_symplectic(evaluate_series(s, h / 2)).defect();
    const double d4 = assemble_symplectic(evaluate_series(s, h / 4)).defect();
    const double r1 = d1 / d2, r2 = d2 / d4;
    const bool ok = std::abs(r1 / 4 - 1) <= 0.1 && std::abs(r2 / 4 - 1) <= 0.1;
    return Outcome{ok, fmt::format("defect ratios {:.4f}, {:.4f}", r1, r2)};
  });

  criterion(11, "CLI validity guard", [&] {
    const std::string cfg = (std::filesystem::temp_directory_path() / "relmetro_acceptance_strong.json").string();
    std::ofstream(cfg) << R"({"scenario": {"acceleration_m_per_s2": 1e-8}})";
    std::ostringstream out_ok, err_ok, out_bad, err_bad;
    const int code_ok = cli::run({"qfi"}, out_ok, err_ok);
    const int code_bad = cli::run({"qfi", "--config", cfg}, out_bad, err_bad);
    const bool ok_valid = code_ok == 0 && out_ok.str().find("valid             yes") != std::string::npos;
    const bool bad_flagged = code_bad == 0 && out_bad.str().find("valid             NO") != std::string::npos &&
                             err_bad.str().find("warning") != std::string::npos;
    const double edge = head.validity_edge_a;
    return Outcome{ok_valid && bad_flagged && edge >= 1e-9 && edge <= 1e-7,
                   fmt::format("a = 1e-10 valid {}, a = 1e-8 flagged {}, edge a = {:.3e} m/s^2", ok_valid,
                               bad_flagged, edge)};
  });

  fmt::print("{} of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
