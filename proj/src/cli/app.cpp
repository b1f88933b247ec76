#include "relmetro_cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace relmetro::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;
  int workers = 1;
  int nmax = 0;
};

void emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output_path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError(fmt::format("cannot write output file '{}'", cfg.output_path));
  f << text;
  if (!f) throw ConfigError(fmt::format("failed while writing '{}'", cfg.output_path));
}

std::string num(double v) { return fmt::format("{:.16e}", v); }

PreciseGaussianState state_from(const StateSpec& spec, const RunConfig& cfg) {
  if (spec.covariance) return PreciseGaussianState(Matrix<Precise>(spec.covariance->cast<Precise>()));
  PreciseGaussianState s = initial_product_squeezed<Precise>(spec.r_k, spec.r_kprime);
  if (!spec.acceleration_m_per_s2) return s;
  const BogoliubovSeries series = complete_second_order(build_scenario_series(cfg.scenario));
  const double h = h_from_acceleration(*spec.acceleration_m_per_s2, cfg.scenario);
  return transform_reduced<Precise>(s, series, Precise(h), cfg.scenario.k, cfg.scenario.kprime);
}

int cmd_qfi(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ScenarioEvaluation ev = evaluate_scenario(cfg.scenario, cfg.acceleration_m_per_s2, cfg.qfi_numeric, cfg.policy);
  const EstimationResult& e = ev.estimate;
  const double qn = ev.qfi_numeric.value_or(std::nan(""));
  out << fmt::format("qfi_analytic      {:.6e}\n", ev.qfi_analytic);
  if (ev.qfi_numeric) out << fmt::format("qfi_numeric       {:.6e}\n", qn);
  out << fmt::format("delta_h           {:.6e}\n", e.delta_h);
  out << fmt::format("delta_a           {:.6e} m/s^2  (N = {:g})\n", e.delta_a, e.n_measurements);
  out << fmt::format("validity_margin   {:.6e}  (H h^2 at a = {:g} m/s^2, threshold {:g})\n", e.validity_margin,
                     ev.acceleration_m_per_s2, cfg.policy.validity_threshold);
  out << fmt::format("validity_edge_a   {:.6e} m/s^2  (H h^2 = 1)\n", ev.validity_edge_a);
  out << fmt::format("valid             {}\n", e.qfi_valid ? "yes" : "NO");
  if (!e.qfi_valid)
    err << fmt::format(
        "warning: H h^2 = {:.3e} >= {:g}; the perturbative expansion does not hold. Keep a well below {:.3e} m/s^2.\n",
        e.validity_margin, cfg.policy.validity_threshold, ev.validity_edge_a);

  if (cfg.output_path.empty()) return kSuccess;
  std::string text;
  if (cfg.format == "json") {
    nlohmann::ordered_json o;
    o["tau_s"] = ev.tau_s;
    o["r"] = ev.r;
    o["qfi"] = ev.qfi_analytic;
    o["delta_h"] = e.delta_h;
    o["delta_a_m_per_s2"] = e.delta_a;
    o["validity_margin"] = e.validity_margin;
    o["tail_estimate"] = ev.tail_estimate;
    o["qfi_numeric"] = ev.qfi_numeric ? nlohmann::ordered_json(qn) : nlohmann::ordered_json(nullptr);
    o["qfi_valid"] = e.qfi_valid;
    o["acceleration_m_per_s2"] = ev.acceleration_m_per_s2;
    o["validity_edge_a_m_per_s2"] = ev.validity_edge_a;
    text = o.dump(2) + "\n";
  } else {
    text =
        "tau_s,r,qfi,delta_h,delta_a_m_per_s2,validity_margin,tail_estimate,qfi_numeric,qfi_valid,"
        "acceleration_m_per_s2,validity_edge_a_m_per_s2\n";
    text += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", num(ev.tau_s), num(ev.r), num(ev.qfi_analytic),
                        num(e.delta_h), num(e.delta_a), num(e.validity_margin), num(ev.tail_estimate), num(qn),
                        e.qfi_valid ? 1 : 0, num(ev.acceleration_m_per_s2), num(ev.validity_edge_a));
  }
  emit(text, cfg, out);
  return kSuccess;
}

int cmd_fidelity(const RunConfig& cfg, std::ostream& out) {
  const PreciseGaussianState a = state_from(cfg.fidelity_first, cfg);
  const PreciseGaussianState b = state_from(cfg.fidelity_second, cfg);
  for (const auto* s : {&a, &b}) {
    const PhysicalityReport rep = check_physical(*s, cfg.policy);
    if (!rep.physical) throw InvalidState(fmt::format("configured state is not physical: {}", rep.violations.front()));
  }
  const FidelityBreakdown f = to_double(fidelity_two_mode(a, b, cfg.policy));
  std::string text;
  if (cfg.format == "json") {
    nlohmann::ordered_json o = {{"Gamma", f.Gamma}, {"Lambda1", f.Lambda1}, {"Lambda2", f.Lambda2},
                                {"Delta", f.Delta}, {"Pi", f.Pi},           {"fidelity", f.fidelity}};
    text = o.dump(2) + "\n";
  } else {
    text = "Gamma,Lambda1,Lambda2,Delta,Pi,fidelity\n";
    text += fmt::format("{},{},{},{},{},{}\n", num(f.Gamma), num(f.Lambda1), num(f.Lambda2), num(f.Delta), num(f.Pi),
                        num(f.fidelity));
  }
  emit(text, cfg, out);
  return kSuccess;
}

int cmd_coeffs(const RunConfig& cfg, std::ostream& out) {
  const BogoliubovSeries s = build_scenario_series(cfg.scenario);
  const int n = s.n_modes;
  std::string text;
  if (cfg.format == "json") {
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (int m = 0; m < n; ++m)
      for (int q = 0; q < n; ++q) {
        if (m == q) continue;
        const StaticCoefficients st = static_first_order(m + 1, q + 1);
        entries.push_back({{"m", m + 1},
                           {"n", q + 1},
                           {"alpha_static", st.alpha1},
                           {"beta_static", st.beta1},
                           {"alpha1", {s.alpha1(m, q).real(), s.alpha1(m, q).imag()}},
                           {"beta1", {s.beta1(m, q).real(), s.beta1(m, q).imag()}}});
      }
    nlohmann::ordered_json g = nlohmann::ordered_json::array();
    for (int m = 0; m < n; ++m) g.push_back({s.G(m).real(), s.G(m).imag()});
    nlohmann::ordered_json o;
    o["n_modes"] = n;
    o["tau_s"] = cfg.scenario.tau_s;
    o["drive_omega_rad_per_s"] = cfg.scenario.drive_omega();
    o["G"] = g;
    o["entries"] = entries;
    text = o.dump(2) + "\n";
  } else {
    text = "m,n,alpha_static,beta_static,alpha1_re,alpha1_im,beta1_re,beta1_im,g_m_re,g_m_im\n";
    for (int m = 0; m < n; ++m)
      for (int q = 0; q < n; ++q) {
        if (m == q) continue;
        const StaticCoefficients st = static_first_order(m + 1, q + 1);
        text += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", m + 1, q + 1, num(st.alpha1), num(st.beta1),
                            num(s.alpha1(m, q).real()), num(s.alpha1(m, q).imag()), num(s.beta1(m, q).real()),
                            num(s.beta1(m, q).imag()), num(s.G(m).real()), num(s.G(m).imag()));
      }
  }
  emit(text, cfg, out);
  return kSuccess;
}

int cmd_sweep(const RunConfig& cfg, int workers, std::ostream& out) {
  const auto records = run_sweep(cfg, workers);
  const std::string& p = cfg.sweep->parameter;
  emit(cfg.format == "json" ? sweep_json(records, p) : sweep_csv(records, p), cfg, out);
  return kSuccess;
}

int cmd_figure2(const RunConfig& cfg, int workers, std::ostream& out) {
  const Figure2Table t = run_figure2(cfg, workers);
  emit(cfg.format == "json" ? figure2_json(t) : figure2_csv(t), cfg, out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum metrology bounds for an oscillating BEC cavity accelerometer", "relmetro"};
  app.require_subcommand(1, 1);
  Options opt;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_option("--out", opt.out_path, "Write the result table to this file");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", opt.workers, "Worker threads for sweeps")->check(CLI::Range(1, 1024));
  app.add_option("--nmax", opt.nmax, "Mode truncation (overrides the config)")->check(CLI::Range(2, 100000));
  app.footer(fmt::format("Numeric policy override: set {} to a JSON object, e.g. '{{\"plateau_rel\": 1e-4}}'.",
                         kNumericPolicyEnv));
  CLI::App* qfi = app.add_subcommand("qfi", "QFI, Cramer-Rao bounds and validity for one scenario");
  CLI::App* fig = app.add_subcommand("figure2", "Acceleration bound vs duration for r = 8, 9, 10");
  CLI::App* fid = app.add_subcommand("fidelity", "Fidelity breakdown between two configured states");
  CLI::App* coe = app.add_subcommand("coeffs", "Dump the first-order Bogoliubov series");
  CLI::App* swp = app.add_subcommand("sweep", "Sweep one scenario parameter");
  for (CLI::App* sub : {qfi, fig, fid, coe, swp}) sub->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("relmetro");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kConfigError;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kConfigError;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    RunConfig cfg = opt.config_path.empty() ? parse_config("{}") : load_config(opt.config_path);
    if (opt.nmax > 0) {
      cfg.scenario.n_max = opt.nmax;
      try {
        cfg.scenario.validate();
      } catch (const InvalidScenario& e) {
        throw ConfigError(e.what());
      }
    }
    if (!opt.out_path.empty()) cfg.output_path = opt.out_path;
    if (!opt.format.empty()) cfg.format = opt.format;

    if (qfi->parsed()) return cmd_qfi(cfg, out, err);
    if (fig->parsed()) return cmd_figure2(cfg, opt.workers, out);
    if (fid->parsed()) return cmd_fidelity(cfg, out);
    if (coe->parsed()) return cmd_coeffs(cfg, out);
    return cmd_sweep(cfg, opt.workers, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidScenario& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NoPlateau& e) {
    err << "numeric failure: " << e.what() << "\n  steps:";
    for (double s : e.steps()) err << fmt::format(" {:.3e}", s);
    err << "\n  estimates:";
    for (double s : e.estimates()) err << fmt::format(" {:.6e}", s);
    err << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace relmetro::cli
