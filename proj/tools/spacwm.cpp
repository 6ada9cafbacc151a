// spacwm: command-line front end for the SPAC weak-measurement toolkit.
//
// Exit codes: 0 success, 1 invariant failure, 2 invalid configuration.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "spac/analytic.hpp"
#include "spac/audit.hpp"
#include "spac/config.hpp"
#include "spac/fock.hpp"
#include "spac/metrology.hpp"
#include "spac/sweep.hpp"
#include "spac/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvariantFailure = 1;
constexpr int kInvalidConfig = 2;

// Cross-engine tolerance for single-point commands.
constexpr double kAgreement = 1e-8;

struct PointOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string phi, delta, r, theta, sigma, gamma, n;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "configuration file");
    cmd->add_option("--set", overrides, "override, e.g. point.phi=5pi/12 or sweep.count=51");
    cmd->add_option("--phi", phi, "preselection angle (accepts e.g. 5pi/12)");
    cmd->add_option("--delta", delta, "relative phase of the preselected state");
    cmd->add_option("--r", r, "coherent amplitude modulus");
    cmd->add_option("--theta", theta, "coherent amplitude phase");
    cmd->add_option("--sigma", sigma, "beam width");
    cmd->add_option("--Gamma,--gamma", gamma, "measurement strength g/sigma");
    cmd->add_option("-N,--trials", n, "number of trials");
  }

  spac::config::Config resolve() const {
    spac::config::Config cfg;
    if (!config_path.empty()) cfg = spac::config::load(config_path);
    std::vector<std::string> all = overrides;
    auto add = [&](const char* key, const std::string& v) {
      if (!v.empty()) all.push_back(std::string("point.") + key + "=" + v);
    };
    add("phi", phi);
    add("delta", delta);
    add("r", r);
    add("theta", theta);
    add("sigma", sigma);
    add("Gamma", gamma);
    add("N", n);
    spac::config::apply_overrides(cfg, all);
    return cfg;
  }
};

void print_point(const spac::ParameterRecord& p) {
  fmt::print("phi = {:.17g}\ndelta = {:.17g}\nr = {:.17g}\ntheta = {:.17g}\nsigma = {:.17g}\n"
             "Gamma = {:.17g}\nN = {}\n",
             p.phi, p.delta, p.r, p.theta, p.sigma, p.Gamma, p.N);
}

double rel(double a, double b, double unit) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), unit});
}

int cmd_transition(const PointOptions& opts) {
  const auto cfg = opts.resolve();
  const auto& p = cfg.point;
  const auto sel = p.selection();
  const auto ptr = p.pointer();
  const auto cpl = p.coupling();
  const auto a = spac::analytic::pointer_shifts(sel, ptr, cpl);
  const auto o = spac::fock::evaluate(sel, ptr, cpl, cfg.policy);
  const auto aw = spac::weak_value(sel);

  print_point(p);
  fmt::print("weak_value = {:.12g} {:+.12g}i\n", aw.real(), aw.imag());
  fmt::print("abl_conditional = {:.12g}\n", spac::abl_conditional(sel));
  fmt::print("transition_analytic = {:.12g} {:+.12g}i\n", a.transition_value.real(),
             a.transition_value.imag());
  fmt::print("transition_oracle = {:.12g} {:+.12g}i\n", o.transition_value.real(),
             o.transition_value.imag());
  fmt::print("beta_inv_sq analytic = {:.12g} oracle = {:.12g}\n", a.beta_sq_inv, o.beta_sq_inv);
  fmt::print("dx analytic = {:.12g} oracle = {:.12g}\n", a.dx, o.dx);
  fmt::print("dp analytic = {:.12g} oracle = {:.12g}\n", a.dp, o.dp);
  fmt::print("n_max = {}\ntail_mass = {:.3g}\n", o.n_max, o.tail_mass);

  const double s = ptr.sigma();
  const double worst = std::max({rel(a.dx, o.dx, s), rel(a.dp, o.dp, 1.0 / s),
                                 std::abs(a.transition_value - o.transition_value) /
                                     std::max(1.0, std::abs(o.transition_value)),
                                 rel(a.beta_sq_inv, o.beta_sq_inv, 1.0)});
  fmt::print("max_engine_residual = {:.3g}\n", worst);
  return worst <= kAgreement ? kOk : kInvariantFailure;
}

int cmd_snr(const PointOptions& opts) {
  const auto cfg = opts.resolve();
  const auto& p = cfg.point;
  const auto s = spac::metrology::snr_ratio(p.selection(), p.pointer(), p.coupling(), p.N, cfg.policy);
  print_point(p);
  fmt::print("chi = {:.12g}\nR_p = {:.12g}\nR_n = {:.12g}\nP_s = {:.12g}\nP_exact = {:.12g}\n", s.chi,
             s.R_p, s.R_n, s.P_s, s.exact_success_probability);
  fmt::print("dx = {:.12g}\ndx_analytic = {:.12g}\nDx = {:.12g}\ndx_prime = {:.12g}\nDx_prime = {:.12g}\n",
             s.dx, s.dx_analytic, s.Dx, s.dx_prime, s.Dx_prime);
  fmt::print("n_max = {}\ntail_mass = {:.3g}\n", s.n_max, s.tail_mass);
  const bool ok = rel(s.dx, s.dx_analytic, p.sigma) <= kAgreement;
  return ok ? kOk : kInvariantFailure;
}

int cmd_qfi(const PointOptions& opts, double step) {
  const auto cfg = opts.resolve();
  const auto& p = cfg.point;
  const auto q = spac::metrology::qfi(p.selection(), p.pointer(), p.coupling(), step, p.N, cfg.policy);
  print_point(p);
  fmt::print("F = {:.12g}\nF_fidelity = {:.12g}\nF_Q = {:.12g}\ncrb = {:.12g}\nstep = {:.3g}\n", q.F,
             q.F_fidelity, q.F_Q, q.crb, q.step);
  fmt::print("n_max = {}\ntail_mass = {:.3g}\n", q.n_max, q.tail_mass);
  return kOk;
}

int cmd_sweep(const PointOptions& opts, const std::string& preset, int count, const std::string& out,
              const std::string& svg, int threads) {
  std::vector<spac::sweep::SweepSpec> specs;
  spac::fock::TruncationPolicy policy;
  std::pair<std::string, std::string> plot{"", ""};
  std::string title = preset;
  if (!preset.empty()) {
    specs = spac::sweep::preset(preset, count > 0 ? count : 201);
    plot = spac::sweep::preset_plot_columns(preset);
    if (!opts.config_path.empty()) policy = opts.resolve().policy;
  } else {
    auto cfg = opts.resolve();
    if (!cfg.sweep) throw spac::config::ConfigError("sweep needs --preset or a [sweep] section");
    if (count > 0) cfg.sweep->range.count = count;
    cfg.sweep->validate();
    specs.push_back(*cfg.sweep);
    policy = cfg.policy;
    const auto axis = spac::sweep::to_string(cfg.sweep->axis);
    const auto first = spac::sweep::to_string(*cfg.sweep->outputs.begin());
    const std::map<std::string, std::string> y{{"dx", "dx_oracle"},     {"dp", "dp_oracle"},
                                               {"transition", "transition_oracle.re"},
                                               {"chi", "chi"},         {"qfi", "F_Q"},
                                               {"crb", "crb"}};
    plot = {axis, y.at(first)};
    title = "sweep over " + axis;
  }

  const auto table = spac::sweep::run_sweeps(specs, policy, threads);
  if (out.empty() || out == "-") {
    spac::sweep::write_csv(std::cout, table);
  } else {
    std::ofstream f(out);
    if (!f) throw spac::config::ConfigError("cannot write '" + out + "'");
    spac::sweep::write_csv(f, table);
  }
  if (!svg.empty()) {
    std::ofstream f(svg);
    if (!f) throw spac::config::ConfigError("cannot write '" + svg + "'");
    spac::sweep::write_svg(f, table, plot.first, plot.second, title);
  }
  std::size_t flagged = 0;
  for (const auto& row : table.rows) flagged += row.status != "ok";
  std::cerr << fmt::format("{} rows, {} flagged\n", table.rows.size(), flagged);
  return kOk;
}

int cmd_verify(const std::string& level, const std::string& audit_csv) {
  const auto report = spac::verify::run(spac::verify::parse_level(level));
  spac::verify::print(std::cout, report);
  if (!audit_csv.empty()) {
    std::ofstream f(audit_csv);
    if (!f) throw spac::config::ConfigError("cannot write '" + audit_csv + "'");
    spac::audit::write_audit_csv(f, report.audit);
  }
  return report.ok() ? kOk : kInvariantFailure;
}

int cmd_audit(const std::string& out) {
  const auto rows = spac::audit::audit_table(spac::audit::default_audit_points());
  if (out.empty() || out == "-") {
    spac::audit::write_audit_csv(std::cout, rows);
  } else {
    std::ofstream f(out);
    if (!f) throw spac::config::ConfigError("cannot write '" + out + "'");
    spac::audit::write_audit_csv(f, rows);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Postselected von Neumann measurement with a single-photon-added coherent pointer"};
  app.require_subcommand(1);

  PointOptions transition_opts, snr_opts, qfi_opts, sweep_opts;
  auto* transition = app.add_subcommand("transition", "transition value, shifts and normalisation at one point");
  transition_opts.attach(transition);

  auto* snr = app.add_subcommand("snr", "postselected vs nonpostselected SNR ratio chi");
  snr_opts.attach(snr);

  double step = spac::metrology::kDefaultQfiStep;
  auto* qfi = app.add_subcommand("qfi", "quantum Fisher information and Cramer-Rao bound for Gamma");
  qfi_opts.attach(qfi);
  qfi->add_option("--step", step, "finite-difference step")->check(CLI::PositiveNumber);

  std::string preset, out, svg;
  int count = 0;
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep (preset or [sweep] config section) to CSV");
  sweep_opts.attach(sweep);
  sweep->add_option("--preset", preset, "figure preset")
      ->check(CLI::IsMember(spac::sweep::preset_names()));
  sweep->add_option("--count", count, "points per axis (default 201)")->check(CLI::Range(2, 1000000));
  sweep->add_option("-o,--out", out, "CSV output file (default stdout)");
  sweep->add_option("--svg", svg, "also write an SVG line plot");
  sweep->add_option("--threads", threads, "worker threads (default SPAC_THREADS or all cores)")
      ->check(CLI::Range(1, 256));

  std::string level = "fast", audit_csv;
  auto* verify = app.add_subcommand("verify", "run the invariant suites and the printed-formula audit");
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--audit-csv", audit_csv, "write the audit table as CSV");

  std::string audit_out;
  auto* audit = app.add_subcommand("audit", "printed closed forms vs first principles vs oracle, as CSV");
  audit->add_option("-o,--out", audit_out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*transition) return cmd_transition(transition_opts);
    if (*snr) return cmd_snr(snr_opts);
    if (*qfi) return cmd_qfi(qfi_opts, step);
    if (*sweep) return cmd_sweep(sweep_opts, preset, count, out, svg, threads);
    if (*verify) return cmd_verify(level, audit_csv);
    if (*audit) return cmd_audit(audit_out);
  } catch (const spac::InvalidParameter& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const spac::OrthogonalSelection& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const spac::metrology::DegenerateReference& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariantFailure;
  }
  return kOk;
}
