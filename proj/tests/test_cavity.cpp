#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relmetro/cavity.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

using namespace relmetro;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite 20-point Gauss rule; the integrand is entire, so fixed panels converge fast.
Complex quadrature(double omega, double delta, double tau) {
  using boost::math::quadrature::gauss;
  const int panels = 64;
  const double w = tau / panels;
  Complex sum = 0;
  for (int p = 0; p < panels; ++p) {
    auto re = [&](double t) { return std::sin(omega * t) * std::cos(delta * t); };
    auto im = [&](double t) { return std::sin(omega * t) * std::sin(delta * t); };
    sum += Complex(gauss<double, 20>::integrate(re, p * w, (p + 1) * w),
                   gauss<double, 20>::integrate(im, p * w, (p + 1) * w));
  }
  return sum;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("mode spectrum") {
  CavityScenario sc;
  CHECK(mode_frequency(1, sc) == doctest::Approx(2 * kPi * 500));
  CHECK(mode_frequency(2, sc) == doctest::Approx(2 * kPi * 1000));
  CavityScenario wide = sc;
  wide.length_m *= 2;
  CHECK(mode_frequency(3, wide) == doctest::Approx(mode_frequency(3, sc) / 2));
  CavityScenario alt = sc;
  alt.spectrum_prefactor = 2 * kPi;
  CHECK(mode_frequency(1, alt) == doctest::Approx(2 * kPi * 1000));
  CHECK(sc.drive_omega() == doctest::Approx(2 * kPi * 1500));
  CHECK_THROWS_AS(mode_frequency(0, sc), ModeOutOfRange);
}

TEST_CASE("acceleration dictionary") {
  CavityScenario sc;
  CHECK(h_from_acceleration(1e-9, sc) == doctest::Approx(1e-9).epsilon(1e-14));
  CHECK(h_from_acceleration(0.0, sc) == 0.0);
  const double a = 3.7e-9;
  const double n = sc.light_speed_m_per_s / sc.sound_speed_m_per_s;
  CHECK(a * sc.length_m * n * n / (sc.light_speed_m_per_s * sc.light_speed_m_per_s) ==
        doctest::Approx(h_from_acceleration(a, sc)).epsilon(1e-14));
  CHECK(acceleration_from_h(h_from_acceleration(a, sc), sc) == doctest::Approx(a).epsilon(1e-15));

  // Faster sound at fixed a·L drives h to zero and the transformation to the identity.
  double prev = h_from_acceleration(a, sc);
  for (double cs : {1e-2, 1e-1, 1.0, 10.0}) {
    CavityScenario fast = sc;
    fast.sound_speed_m_per_s = cs;
    const double h = h_from_acceleration(a, fast);
    CHECK(h < prev);
    prev = h;
  }
  CavityScenario fast = sc;
  fast.tau_s = 0.01;
  fast.n_max = 8;
  const BogoliubovSeries s = build_scenario_series(fast);
  const BogoliubovCoefficients c = evaluate_series(s, prev);
  CHECK(c.beta.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("static first-order coefficients") {
  const StaticCoefficients a = static_first_order(1, 2);
  CHECK(a.alpha1 == doctest::Approx(-0.28658).epsilon(1e-4));
  CHECK(a.beta1 == doctest::Approx(0.010614).epsilon(1e-4));
  const StaticCoefficients b = static_first_order(2, 1);
  CHECK(b.alpha1 == doctest::Approx(0.28658).epsilon(1e-4));
  CHECK(b.beta1 == a.beta1);
  const StaticCoefficients same = static_first_order(1, 3);
  CHECK(same.alpha1 == 0.0);
  CHECK(same.beta1 == 0.0);
  CHECK_THROWS_AS(static_first_order(2, 2), ModeOutOfRange);
}

TEST_CASE("closed-form sinusoidal integral") {
  CHECK(std::abs(sinusoidal_integral(3.0, 1.0, 0.0)) == 0.0);
  for (auto [w, d, t] : {std::tuple{5.0, 1.2, 2.0}, std::tuple{5.0, 5.0, 1.5}, std::tuple{5.0, -5.0, 1.5},
                         std::tuple{40.0, 39.9999999, 3.0}, std::tuple{0.0, 2.0, 1.0}}) {
    const Complex cf = sinusoidal_integral(w, d, t);
    const Complex q = quadrature(w, d, t);
    CHECK(std::abs(cf - q) < 1e-10);
  }
  // Exact resonance: ∫ sin(ωt) e^{iωt} dt = iτ/2 + (1 - e^{2iωτ})/(4ω)
  const double w = 7.0, tau = 3.3;
  const Complex expect = Complex(0, tau / 2) + (1.0 - std::polar(1.0, 2 * w * tau)) / (4 * w);
  CHECK(std::abs(sinusoidal_integral(w, w, tau) - expect) < 1e-13);
}

TEST_CASE("series structure") {
  CavityScenario sc;
  sc.tau_s = 0.37;
  sc.n_max = 14;
  const BogoliubovSeries s = build_scenario_series(sc);
  for (int m = 0; m < s.n_modes; ++m) {
    for (int n = 0; n < s.n_modes; ++n) {
      if ((m - n) % 2 == 0) {
        CHECK(s.alpha1(m, n) == Complex(0));
        CHECK(s.beta1(m, n) == Complex(0));
      }
    }
  }
  // Ḡα1 anti-Hermitian and Ḡβ1 symmetric, exactly.
  const ComplexMatrix a = s.G.conjugate().asDiagonal() * s.alpha1;
  const ComplexMatrix b = s.G.conjugate().asDiagonal() * s.beta1;
  CHECK((a + a.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((b - b.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  CavityScenario zero = sc;
  zero.tau_s = 0.0;
  const BogoliubovSeries z = build_scenario_series(zero);
  CHECK(z.alpha1.isZero(0));
  CHECK(z.beta1.isZero(0));

  CavityScenario small = sc;
  small.n_max = 1;
  CHECK_THROWS_AS(build_scenario_series(small), InvalidScenario);
  CavityScenario parity = sc;
  parity.kprime = 3;
  CHECK_THROWS_AS(build_scenario_series(parity), InvalidScenario);
}

TEST_CASE("resonant growth") {
  CavityScenario sc;
  sc.n_max = 4;
  const double slope_expect =
      std::abs(static_first_order(1, 2).beta1) * (mode_frequency(1, sc) + mode_frequency(2, sc)) / 2;
  std::vector<double> taus, mags;
  for (int i = 0; i <= 30; ++i) {
    sc.tau_s = 0.1 + 0.03 * i;
    taus.push_back(sc.tau_s);
    mags.push_back(std::abs(build_scenario_series(sc).beta1(0, 1)));
  }
  CHECK(slope(taus, mags) == doctest::Approx(slope_expect).epsilon(1e-3));

  // At resonance the (1,2) pair-creation entry dominates every other β entry.
  sc.tau_s = 1.0;
  sc.n_max = 12;
  const BogoliubovSeries s = build_scenario_series(sc);
  ComplexMatrix others = s.beta1;
  others(0, 1) = others(1, 0) = 0;
  CHECK(std::abs(s.beta1(0, 1)) > 10 * others.cwiseAbs().maxCoeff());

  // Far off resonance there is no secular growth.
  CavityScenario off = sc;
  off.n_max = 4;
  off.omega_rad_per_s = 0.37 * sc.drive_omega();
  double worst = 0;
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    off.tau_s = t;
    worst = std::max(worst, std::abs(build_scenario_series(off).beta1(0, 1)));
  }
  CHECK(worst < 0.05);

  // Driving at the difference frequency makes |α1_kk'| grow instead.
  CavityScenario diff = sc;
  diff.n_max = 4;
  diff.omega_rad_per_s = mode_frequency(2, sc) - mode_frequency(1, sc);
  diff.tau_s = 1.0;
  const double a1 = std::abs(build_scenario_series(diff).alpha1(0, 1));
  diff.tau_s = 10.0;
  const double a10 = std::abs(build_scenario_series(diff).alpha1(0, 1));
  CHECK(a10 / a1 == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("stroboscopic snapping") {
  CavityScenario sc;
  CHECK(stroboscopic_tau(0.0101, sc) == doctest::Approx(0.01));
  CHECK(stroboscopic_tau(0.0001, sc) == doctest::Approx(0.002));
  CHECK(stroboscopic_tau(30.0, sc) == doctest::Approx(30.0));
}

TEST_CASE("truncation of the paper-parameter series") {
  CavityScenario a;
  a.tau_s = 1.0;
  a.n_max = 50;
  CavityScenario b = a;
  b.n_max = 100;
  const auto in = initial_product_squeezed<Precise>(10, 10);
  const Precise h("1e-10");
  const auto sa = transform_reduced<Precise>(in, complete_second_order(build_scenario_series(a)), h, 1, 2);
  const auto sb = transform_reduced<Precise>(in, complete_second_order(build_scenario_series(b)), h, 1, 2);
  CHECK(to_double((sa.cov - sb.cov).cwiseAbs().maxCoeff()) < 1e-10);
}
