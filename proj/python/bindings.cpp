#include "relmetro/relmetro.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace relmetro;

namespace {

GaussianState state_from(const Eigen::MatrixXd& cov) { return GaussianState(cov); }

AnalyticForm form_from(const std::string& name) {
  if (name == "rederived") return AnalyticForm::rederived;
  if (name == "as_printed") return AnalyticForm::as_printed;
  throw py::value_error("form must be 'rederived' or 'as_printed'");
}

py::dict breakdown_dict(const FidelityBreakdown& f) {
  py::dict d;
  d["Gamma"] = f.Gamma;
  d["Lambda1"] = f.Lambda1;
  d["Lambda2"] = f.Lambda2;
  d["Delta"] = f.Delta;
  d["Pi"] = f.Pi;
  d["fidelity"] = f.fidelity;
  return d;
}

py::dict estimate_dict(const EstimationResult& e) {
  py::dict d;
  d["qfi"] = e.qfi;
  d["qfi_valid"] = e.qfi_valid;
  d["validity_margin"] = e.validity_margin;
  d["delta_h"] = e.delta_h;
  d["delta_a"] = e.delta_a;
  d["n_measurements"] = e.n_measurements;
  return d;
}

}  // namespace

PYBIND11_MODULE(_relmetro, m) {
  m.doc() = "Gaussian-state metrology for an oscillating BEC cavity accelerometer";

  auto base = py::register_exception<Error>(m, "RelmetroError", PyExc_RuntimeError);
  py::register_exception<ModeOutOfRange>(m, "ModeOutOfRange", base);
  py::register_exception<InvalidState>(m, "InvalidState", base);
  py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", base);
  py::register_exception<ConditioningError>(m, "ConditioningError", base);
  py::register_exception<NoInformation>(m, "NoInformation", base);
  py::register_exception<MissingFirstOrder>(m, "MissingFirstOrder", base);
  py::register_exception<InvalidScenario>(m, "InvalidScenario", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<NoPlateau>(m, "NoPlateau", base);

  py::class_<CavityScenario>(m, "CavityScenario")
      .def(py::init<>())
      .def_readwrite("length_m", &CavityScenario::length_m)
      .def_readwrite("sound_speed_m_per_s", &CavityScenario::sound_speed_m_per_s)
      .def_readwrite("light_speed_m_per_s", &CavityScenario::light_speed_m_per_s)
      .def_readwrite("k", &CavityScenario::k)
      .def_readwrite("kprime", &CavityScenario::kprime)
      .def_readwrite("r", &CavityScenario::r)
      .def_readwrite("omega_rad_per_s", &CavityScenario::omega_rad_per_s)
      .def_readwrite("tau_s", &CavityScenario::tau_s)
      .def_readwrite("n_max", &CavityScenario::n_max)
      .def_readwrite("n_measurements", &CavityScenario::n_measurements)
      .def_readwrite("spectrum_prefactor", &CavityScenario::spectrum_prefactor)
      .def("validate", &CavityScenario::validate)
      .def("drive_omega", &CavityScenario::drive_omega);

  py::class_<BogoliubovSeries>(m, "BogoliubovSeries")
      .def_readonly("n_modes", &BogoliubovSeries::n_modes)
      .def_readonly("G", &BogoliubovSeries::G)
      .def_readonly("alpha1", &BogoliubovSeries::alpha1)
      .def_readonly("beta1", &BogoliubovSeries::beta1)
      .def("has_second_order", &BogoliubovSeries::has_second_order)
      .def_static("trivial", &BogoliubovSeries::trivial, py::arg("n_modes"));

  m.def("mode_frequency", &mode_frequency, py::arg("n"), py::arg("scenario"));
  m.def("h_from_acceleration", &h_from_acceleration, py::arg("a"), py::arg("scenario"));
  m.def("acceleration_from_h", &acceleration_from_h, py::arg("h"), py::arg("scenario"));
  m.def(
      "static_first_order",
      [](int mm, int n) {
        const StaticCoefficients s = static_first_order(mm, n);
        return py::make_tuple(s.alpha1, s.beta1);
      },
      py::arg("m"), py::arg("n"));
  m.def("sinusoidal_integral", &sinusoidal_integral, py::arg("omega"), py::arg("delta"), py::arg("tau"));
  m.def("build_scenario_series", &build_scenario_series, py::arg("scenario"));
  m.def("complete_second_order", &complete_second_order, py::arg("series"));
  m.def("stroboscopic_tau", &stroboscopic_tau, py::arg("tau"), py::arg("scenario"));

  m.def("symplectic_form", [](int n) { return symplectic_form(n); }, py::arg("num_modes"));
  m.def("initial_product_squeezed", [](double rk, double rkp) { return initial_product_squeezed(rk, rkp).cov; },
        py::arg("r_k"), py::arg("r_kprime"));
  m.def("purity", [](const Eigen::MatrixXd& cov) { return purity(state_from(cov)); }, py::arg("cov"));
  m.def(
      "check_physical",
      [](const Eigen::MatrixXd& cov) {
        const PhysicalityReport r = check_physical(state_from(cov));
        py::dict d;
        d["physical"] = r.physical;
        d["symmetry_violation"] = r.symmetry_violation;
        d["min_uncertainty_eigenvalue"] = r.min_uncertainty_eigenvalue;
        d["violations"] = r.violations;
        return d;
      },
      py::arg("cov"));

  m.def(
      "transform_reduced",
      [](const Eigen::MatrixXd& cov, const BogoliubovSeries& s, double h, int k, int kp, bool precise) {
        const GaussianState in = state_from(cov);
        if (!precise) return transform_reduced<double>(in, s, h, k, kp).cov;
        const auto out = transform_reduced<Precise>(in.cast<Precise>(), s, Precise(h), k, kp);
        return Eigen::MatrixXd(out.cov.unaryExpr([](const Precise& x) { return to_double(x); }));
      },
      py::arg("cov"), py::arg("series"), py::arg("h"), py::arg("k"), py::arg("kprime"), py::arg("precise") = true);
  m.def(
      "transform_full_oracle",
      [](const Eigen::MatrixXd& cov, const BogoliubovSeries& s, double h, int k, int kp) {
        return transform_full_oracle<double>(state_from(cov), s, h, k, kp).cov;
      },
      py::arg("cov"), py::arg("series"), py::arg("h"), py::arg("k"), py::arg("kprime"));
  m.def(
      "symplectic_defect",
      [](const BogoliubovSeries& s, double h) { return assemble_symplectic(evaluate_series(s, h)).defect(); },
      py::arg("series"), py::arg("h"));

  m.def(
      "fidelity_two_mode",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, bool precise) {
        const GaussianState sa = state_from(a), sb = state_from(b);
        if (!precise) return breakdown_dict(fidelity_two_mode(sa, sb));
        return breakdown_dict(to_double(fidelity_two_mode(sa.cast<Precise>(), sb.cast<Precise>())));
      },
      py::arg("cov1"), py::arg("cov2"), py::arg("precise") = true);

  m.def(
      "mode_sums",
      [](const BogoliubovSeries& s, int k, int kp) {
        const ModeSums ms = mode_sums(s, k, kp);
        py::dict d;
        d["f_alpha_k"] = ms.f_alpha_k;
        d["f_beta_k"] = ms.f_beta_k;
        d["f_alpha_kprime"] = ms.f_alpha_kprime;
        d["f_beta_kprime"] = ms.f_beta_kprime;
        d["G_alphabeta_kk"] = ms.G_alphabeta_kk;
        d["G_alphabeta_kprimekprime"] = ms.G_alphabeta_kprimekprime;
        d["tail_estimate"] = ms.tail_estimate;
        return d;
      },
      py::arg("series"), py::arg("k"), py::arg("kprime"));
  m.def(
      "qfi_analytic_h0",
      [](const BogoliubovSeries& s, double r, double pk, double pkp, int k, int kp, const std::string& form) {
        return qfi_analytic_h0(s, r, pk, pkp, k, kp, form_from(form));
      },
      py::arg("series"), py::arg("r"), py::arg("phi_k") = 0.0, py::arg("phi_kprime") = 0.0, py::arg("k") = 1,
      py::arg("kprime") = 2, py::arg("form") = "rederived");
  m.def(
      "qfi_numeric",
      [](const CavityScenario& sc, double h) {
        const ScenarioModel model(sc);
        const QfiNumericResult q = model.qfi_numeric(h, StepPolicy::from(numeric_policy()));
        py::dict d;
        d["value"] = q.value;
        d["steps"] = q.steps;
        d["raw"] = q.raw;
        d["richardson1"] = q.richardson1;
        d["spread"] = q.spread;
        return d;
      },
      py::arg("scenario"), py::arg("h") = 0.0);
  m.def(
      "evaluate_scenario",
      [](const CavityScenario& sc, double a, bool with_numeric) {
        const ScenarioEvaluation ev = evaluate_scenario(sc, a, with_numeric);
        py::dict d;
        d["tau_s"] = ev.tau_s;
        d["r"] = ev.r;
        d["acceleration_m_per_s2"] = ev.acceleration_m_per_s2;
        d["h"] = ev.h;
        d["qfi_analytic"] = ev.qfi_analytic;
        d["qfi_numeric"] = ev.qfi_numeric ? py::cast(*ev.qfi_numeric) : py::none();
        d["estimate"] = estimate_dict(ev.estimate);
        d["tail_estimate"] = ev.tail_estimate;
        d["validity_edge_a"] = ev.validity_edge_a;
        return d;
      },
      py::arg("scenario"), py::arg("acceleration_m_per_s2"), py::arg("with_numeric") = false);

  m.def(
      "cramer_rao",
      [](double qfi, double n, double l, double cs) { return estimate_dict(cramer_rao(qfi, n, l, cs)); },
      py::arg("qfi"), py::arg("n_measurements"), py::arg("length_m"), py::arg("sound_speed_m_per_s"));
  m.def(
      "validity_check",
      [](double qfi, double h, double threshold) {
        const ValidityReport v = validity_check(qfi, h, threshold);
        return py::make_tuple(v.valid, v.margin);
      },
      py::arg("qfi_h0"), py::arg("h"), py::arg("threshold") = 1e-2);
  m.def("mach_zehnder_qfi", &mach_zehnder_qfi, py::arg("k_wave"), py::arg("T"));
  m.def("mach_zehnder_bound", &mach_zehnder_bound, py::arg("k_wave"), py::arg("T"), py::arg("n_measurements"));

  m.attr("NUMERIC_POLICY_ENV") = kNumericPolicyEnv;
  m.def("numeric_policy_json", [] { return numeric_policy().to_json(); });
}
