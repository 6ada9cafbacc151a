#include "spac/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <ostream>

#include "spac/analytic.hpp"
#include "spac/fock.hpp"
#include "spac/metrology.hpp"

namespace spac::verify {

namespace {

double rel(double a, double b, double unit) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), unit});
}

double rel(Complex a, Complex b, double unit) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), unit});
}

struct Grid {
  std::vector<double> gammas, phis, deltas, rs;
  double theta = kPi / 6.0;
};

Grid standard_grid(Level level) {
  Grid g;
  if (level == Level::full) {
    for (int i = 0; i <= 30; ++i) g.gammas.push_back(0.1 * i);
    for (int i = 0; i < 10; ++i) g.phis.push_back((0.05 + 0.1 * i) * kPi);
    g.rs = {0.0, 1.0, 2.0, 5.0};
  } else {
    g.gammas = {0.0, 0.3, 1.0, 1.7, 3.0};
    g.phis = {0.05 * kPi, 0.35 * kPi, 0.65 * kPi, 0.95 * kPi};
    g.rs = {0.0, 2.0, 5.0};
  }
  g.deltas = {0.0, kPi / 6.0, 5.0 * kPi / 12.0};
  return g;
}

template <class F>
void for_grid(const Grid& g, F&& f) {
  for (double G : g.gammas)
    for (double phi : g.phis)
      for (double d : g.deltas)
        for (double r : g.rs) f(SelectionParams(phi, d), PointerParams(r, g.theta), Coupling(G));
}

class Runner {
 public:
  explicit Runner(VerifyReport& report) : report_(report) {}

  // `body` returns (passed, detail); exceptions count as failures.
  void check(const std::string& suite, const std::string& name, bool authoritative,
             const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult c;
    c.suite = suite;
    c.name = name;
    c.authoritative = authoritative;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [ok, detail] = body();
      c.passed = ok;
      c.detail = std::move(detail);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(c));
  }

 private:
  VerifyReport& report_;
};

void model_suite(Runner& run) {
  run.check("model", "abl identity 2ReA/(1+|A|^2)", true, [] {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 12; ++j) {
        const SelectionParams s(0.98 * kPi * i / 49.0, 2.0 * kPi * j / 12.0);
        const Complex A = weak_value(s);
        worst = std::max(worst, std::abs(2.0 * A.real() / (1.0 + std::norm(A)) - abl_conditional(s)));
      }
    }
    return std::pair{worst <= 1e-12, fmt::format("max error {:.3g}", worst)};
  });
  run.check("model", "|A_w| nondecreasing in phi", true, [] {
    double prev = 0.0;
    bool ok = true;
    for (int i = 0; i < 200; ++i) {
      const double m = std::abs(weak_value(SelectionParams(0.99 * kPi * i / 199.0, 1.0)));
      ok = ok && m >= prev;
      prev = m;
    }
    return std::pair{ok, std::string("200 points on [0, 0.99 pi]")};
  });
}

void kernel_suite(Runner& run, Level level) {
  run.check("analytic", "kernels vs Fock inner products", true, [] {
    fock::TruncationPolicy policy;
    double worst = 0.0;
    for (double r : {0.0, 1.0, 2.0}) {
      for (double theta : {0.0, kPi / 6.0, kPi / 2.0}) {
        const PointerParams p(r, theta);
        for (Complex mu : {Complex(-0.8, 0.0), Complex(1.3, 0.0), Complex(0.4, -0.7)}) {
          const int n = 160;
          const auto phi = fock::spac_state(p, n, policy);
          const auto D = fock::displacement_operator(mu, n);
          const auto a = fock::annihilation_operator(n);
          const Complex k0 = phi.inner(D.apply(phi, policy.guard_band));
          const Complex k1 = phi.inner(D.apply(a.apply(phi, policy.guard_band), policy.guard_band));
          const auto ks = analytic::displaced_kernels(p, mu);
          worst = std::max({worst, std::abs(k0 - ks.k0), std::abs(k1 - ks.k1)});
        }
      }
    }
    return std::pair{worst <= 1e-10, fmt::format("max |delta K| {:.3g}", worst)};
  });
  run.check("analytic", "beta^-2 closed form equals kernel assembly", true, [level] {
    double worst = 0.0;
    for_grid(standard_grid(level), [&](auto s, auto p, auto c) {
      worst = std::max(worst, rel(analytic::beta_inverse_sq(s, p, c),
                                  analytic::beta_inverse_sq_from_kernels(s, p, c), 1.0));
    });
    return std::pair{worst <= 1e-12, fmt::format("max rel {:.3g}", worst)};
  });
}

void cross_engine_suite(Runner& run, Level level) {
  run.check("cross-engine", "dx, dp, transition, beta^-2 vs oracle (rel 1e-8)", true, [level] {
    fock::TruncationPolicy policy;
    double w[4] = {0, 0, 0, 0};
    int points = 0;
    for_grid(standard_grid(level), [&](auto s, auto p, auto c) {
      const auto a = analytic::pointer_shifts(s, p, c);
      const auto o = fock::evaluate(s, p, c, policy);
      const double sg = p.sigma();
      w[0] = std::max(w[0], rel(a.dx, o.dx, sg));
      w[1] = std::max(w[1], rel(a.dp, o.dp, 1.0 / sg));
      w[2] = std::max(w[2], rel(a.transition_value, o.transition_value, 1.0));
      w[3] = std::max(w[3], rel(a.beta_sq_inv, o.beta_sq_inv, 1.0));
      ++points;
    });
    const double worst = *std::max_element(w, w + 4);
    return std::pair{worst <= 1e-8,
                     fmt::format("{} points; max rel dx {:.2g} dp {:.2g} T {:.2g} beta {:.2g}",
                                 points, w[0], w[1], w[2], w[3])};
  });
}

void limits_suite(Runner& run) {
  const std::vector<double> phis{kPi / 12.0, kPi / 6.0, kPi / 3.0, kPi / 2.0};
  const std::vector<double> deltas{0.0, kPi / 6.0, kPi / 2.0};
  const std::vector<double> rs{0.0, 2.0};

  run.check("limits", "weak limit: transition value -> weak value", true, [&] {
    double worst = 0.0;
    for (double phi : phis)
      for (double d : deltas)
        for (double r : rs) {
          const SelectionParams s(phi, d);
          const PointerParams p(r, kPi / 6.0);
          const auto o = fock::evaluate(s, p, Coupling(1e-4), fock::TruncationPolicy{});
          worst = std::max({worst, std::abs(analytic::transition_value(s, p, Coupling(1e-4)) - weak_value(s)),
                            std::abs(o.transition_value - weak_value(s))});
        }
    return std::pair{worst <= 1e-3, fmt::format("Gamma=1e-4, max |T - A_w| {:.3g}", worst)};
  });

  run.check("limits", "strong limit: transition, dx, dp at Gamma=20", true, [&] {
    double wt = 0.0, wx = 0.0, wp = 0.0;
    for (double phi : phis)
      for (double d : deltas)
        for (double r : rs) {
          const SelectionParams s(phi, d);
          const PointerParams p(r, kPi / 6.0);
          const Coupling c(20.0);
          const double g = c.g(p);
          const auto a = analytic::pointer_shifts(s, p, c);
          const auto o = fock::evaluate(s, p, c, fock::TruncationPolicy{});
          const double abl = abl_conditional(s);
          wt = std::max({wt, std::abs(a.transition_value - abl), std::abs(o.transition_value - abl)});
          wx = std::max({wx, std::abs(a.dx - g * abl) / g, std::abs(o.dx - g * abl) / g});
          wp = std::max({wp, std::abs(a.dp), std::abs(o.dp)});
        }
    return std::pair{wt <= 1e-8 && wx <= 1e-6 && wp <= 1e-6,
                     fmt::format("|T-abl| {:.2g}, |dx-g abl|/g {:.2g}, |dp| {:.2g}", wt, wx, wp)};
  });

  run.check("limits", "weak series W_x, W_p residual ~ Gamma^2", true, [] {
    const SelectionParams s(kPi / 6.0, kPi / 6.0);
    const PointerParams p(2.0, kPi / 6.0);
    const double gs[3] = {1e-3, 3e-3, 1e-2};
    double ex[3], ep[3];
    for (int i = 0; i < 3; ++i) {
      const Coupling c(gs[i]);
      const auto o = fock::evaluate(s, p, c, fock::TruncationPolicy{});
      const auto w = analytic::weak_limit_shifts(s, p, c);
      ex[i] = std::abs(o.dx - w.wx);
      ep[i] = std::abs(o.dp - w.wp);
    }
    auto slope = [&](const double* e) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int i = 0; i < 3; ++i) {
        const double x = std::log(gs[i]), y = std::log(e[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
      }
      return (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    };
    const double kx = slope(ex), kp = slope(ep);
    return std::pair{kx >= 1.9 && kp >= 1.9,
                     fmt::format("fitted exponents x {:.3f}, p {:.3f}", kx, kp)};
  });

  run.check("limits", "Jozsa coefficient equals oracle <XP+PX> - 2<X><P>", true, [] {
    double worst = 0.0;
    for (double r : {0.0, 1.0, 2.0, 3.0})
      for (double th : {0.0, kPi / 6.0, kPi / 3.0, 1.0}) {
        const PointerParams p(r, th, 0.7);
        const auto m = fock::moments(fock::spac_state(p, fock::TruncationPolicy{}), p);
        const double oracle = m.sym_xp - 2.0 * m.mean_x * m.mean_p;
        const double coeff = -analytic::variance_x_theta_derivative(p) / (2.0 * p.sigma() * p.sigma());
        worst = std::max(worst, std::abs(oracle - coeff));
      }
    return std::pair{worst <= 1e-10, fmt::format("max error {:.3g}", worst)};
  });
}

void hygiene_suite(Runner& run, Level level) {
  run.check("hygiene", "truncation doubling changes < 1e-10 relative", true, [level] {
    Grid g = standard_grid(Level::fast);
    if (level == Level::fast) {
      g.gammas = {0.0, 1.0, 3.0};
      g.phis = {0.35 * kPi, 0.95 * kPi};
    } else {
      g.gammas.push_back(20.0);
    }
    double worst = 0.0;
    for_grid(g, [&](auto s, auto p, auto c) {
      worst = std::max(worst, fock::certified_evaluate(s, p, c, fock::TruncationPolicy{}).max_relative_change);
    });
    return std::pair{worst < 1e-10, fmt::format("max relative change {:.3g}", worst)};
  });

  run.check("hygiene", "displacement unitarity on safe subspace", true, [] {
    double worst = 0.0;
    int smallest = 1 << 30;
    const int guard = fock::TruncationPolicy{}.guard_band;
    for (int n : {64, 144, 400}) {
      for (Complex mu : {Complex(0.5, 0.0), Complex(-1.5, 0.8), Complex(3.0, -2.0), Complex(10.0, 0.0)}) {
        const int k = fock::safe_dimension(mu, n, guard);
        if (k == 0) continue;
        smallest = std::min(smallest, k);
        const auto D = fock::displacement_operator(mu, n).matrix();
        const Eigen::MatrixXcd DtD = D.adjoint() * D;
        const Eigen::MatrixXcd block = DtD.topLeftCorner(k, k) - Eigen::MatrixXcd::Identity(k, k);
        worst = std::max(worst, block.cwiseAbs().maxCoeff());
        const auto Dm = fock::displacement_operator(-mu, n).matrix();
        const Eigen::MatrixXcd prod = (Dm * D).topLeftCorner(k, k) - Eigen::MatrixXcd::Identity(k, k);
        worst = std::max(worst, prod.cwiseAbs().maxCoeff());
      }
    }
    return std::pair{worst <= 1e-10, fmt::format("max |D^dag D - 1|, |D(-mu)D(mu) - 1| {:.3g}", worst)};
  });

  run.check("hygiene", "final-state norms and commutator", true, [level] {
    double wn = 0.0, wc = 0.0;
    for_grid(standard_grid(level), [&](auto s, auto p, auto c) {
      const auto fin = fock::assemble_final_state(s, p, c, fock::TruncationPolicy{});
      wn = std::max(wn, std::abs(fin.state.norm_sq() - 1.0));
    });
    for (double G : {0.0, 1.0, 3.0}) {
      const auto fin = fock::assemble_final_state(SelectionParams(kPi / 6, kPi / 6), PointerParams(2, kPi / 6),
                                                  Coupling(G), fock::TruncationPolicy{});
      wc = std::max(wc, std::abs(fock::commutator_expectation(fin.state, PointerParams(2, kPi / 6)) - Complex(0, 1)));
    }
    return std::pair{wn <= 1e-10 && wc <= 1e-8,
                     fmt::format("max |norm^2 - 1| {:.3g}, max |<[X,P]> - i| {:.3g}", wn, wc)};
  });
}

void moments_suite(Runner& run, Level level) {
  run.check("moments", "initial variances vs oracle", true, [] {
    double worst = 0.0;
    for (double r : {0.0, 0.5, 1.0, 2.0, 5.0})
      for (double th : {0.0, kPi / 6.0, kPi / 2.0, 2.0})
        for (double sg : {1.0, 0.3}) {
          const PointerParams p(r, th, sg);
          const auto v = analytic::initial_variances(p);
          const auto m = fock::moments(fock::spac_state(p, fock::TruncationPolicy{}), p);
          worst = std::max({worst, rel(v.var_x, m.var_x(), sg * sg), rel(v.var_p, m.var_p(), 1 / (sg * sg))});
        }
    const auto zero = analytic::initial_variances(PointerParams(0.0, 0.0, 1.0));
    const bool exact = zero.var_x == 3.0 && zero.var_p == 0.75;
    return std::pair{worst <= 1e-10 && exact,
                     fmt::format("max rel {:.3g}; alpha=0 gives ({}, {})", worst, zero.var_x, zero.var_p)};
  });

  run.check("moments", "nonpostselected shift g sin(phi) cos(delta)", true, [level] {
    double worst = 0.0;
    Grid g = standard_grid(level);
    for (double G : g.gammas)
      for (double phi : g.phis)
        for (double d : g.deltas)
          for (double r : g.rs) {
            const SelectionParams s(phi, d);
            const PointerParams p(r, g.theta);
            const Coupling c(G);
            const auto non = fock::nonpostselected_moments(s, p, c, fock::TruncationPolicy{});
            const auto m0 = fock::moments(fock::spac_state(p, non.n_max, fock::TruncationPolicy{}), p);
            const double expected = c.g(p) * std::sin(phi) * std::cos(d);
            worst = std::max(worst, std::abs(non.mean_x - m0.mean_x - expected));
          }
    return std::pair{worst <= 1e-10, fmt::format("max |dx' - g sin cos| {:.3g}", worst)};
  });
}

void metrology_suite(Runner& run) {
  run.check("metrology", "QFI single-branch benchmark F=3", true, [] {
    double worst = 0.0;
    for (double G : {0.2, 1.0, 2.0}) {
      const auto q = metrology::qfi(SelectionParams(kPi / 2, 0.0), PointerParams(0.0, 0.0), Coupling(G));
      worst = std::max({worst, std::abs(q.F - 3.0), std::abs(q.F_Q - 1.5), std::abs(q.crb - 2.0 / 3.0)});
    }
    return std::pair{worst <= 1e-4, fmt::format("max deviation {:.3g}", worst)};
  });
  run.check("metrology", "QFI estimators agree (1e-4)", true, [] {
    int n = 0;
    double worst = 0.0;
    for (double G : {0.1, 0.5, 1.0, 2.0})
      for (double phi : {kPi / 12, kPi / 6, kPi / 3}) {
        const auto q = metrology::qfi(SelectionParams(phi, kPi / 6), PointerParams(2.0, kPi / 6), Coupling(G));
        worst = std::max(worst, std::abs(q.F - q.F_fidelity) / std::max(q.F, 1e-300));
        ++n;
      }
    return std::pair{worst <= 1e-4, fmt::format("{} points, max rel {:.3g}", n, worst)};
  });
  run.check("metrology", "chi independent of N", true, [] {
    const SelectionParams s(kPi / 12, 5 * kPi / 12);
    const PointerParams p(5.0, kPi / 2);
    const double a = metrology::snr_ratio(s, p, Coupling(0.3), 1).chi;
    const double b = metrology::snr_ratio(s, p, Coupling(0.3), 1000).chi;
    return std::pair{std::abs(a - b) <= 1e-12 * std::abs(a), fmt::format("chi {:.12g}", a)};
  });
}

void audit_suite(Runner& run, VerifyReport& report) {
  report.audit = audit::audit_table(audit::default_audit_points());
  run.check("audit", "oracle dp -> 0 and dx -> g abl at Gamma=20", true, [&report] {
    double wp = 0.0, wx = 0.0;
    for (const auto& rec : report.audit) {
      if (rec.point.Gamma != 20.0) continue;
      if (rec.quantity == "dp") wp = std::max(wp, std::abs(rec.oracle));
      if (rec.quantity == "dx") {
        const double target = 20.0 * rec.point.sigma * abl_conditional(rec.point.selection());
        wx = std::max(wx, std::abs(rec.oracle - target) / (20.0 * rec.point.sigma));
      }
    }
    return std::pair{wp <= 1e-6 && wx <= 1e-6, fmt::format("|dp| {:.2g}, |dx - g abl|/g {:.2g}", wp, wx)};
  });
  run.check("audit", "printed dp matches oracle", false, [&report] {
    double at1 = 0.0, at20 = 0.0;
    for (const auto& rec : report.audit) {
      if (rec.quantity != "dp" || rec.point.theta != kPi / 6) continue;
      if (rec.point.Gamma == 1.0) at1 = rec.discrepancy;
      if (rec.point.Gamma == 20.0) at20 = rec.discrepancy;
    }
    return std::pair{at20 <= 1e-6, fmt::format("discrepancy {:.4g} at Gamma=1, {:.4g} at Gamma=20", at1, at20)};
  });
  run.check("audit", "printed dx matches oracle", false, [&report] {
    double worst = 0.0;
    for (const auto& rec : report.audit) {
      if (rec.quantity == "dx") worst = std::max(worst, rec.discrepancy / std::max(1.0, std::abs(rec.oracle)));
    }
    return std::pair{worst <= 1e-6, fmt::format("max relative discrepancy {:.4g}", worst)};
  });
}

}  // namespace

Level parse_level(const std::string& name) {
  if (name == "fast") return Level::fast;
  if (name == "full") return Level::full;
  throw InvalidParameter("unknown verify level '" + name + "' (fast|full)");
}

bool VerifyReport::ok() const { return failures() == 0; }

int VerifyReport::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.authoritative && !c.passed;
  }));
}

VerifyReport run(Level level) {
  VerifyReport report;
  Runner runner(report);
  model_suite(runner);
  kernel_suite(runner, level);
  cross_engine_suite(runner, level);
  limits_suite(runner);
  moments_suite(runner, level);
  hygiene_suite(runner, level);
  metrology_suite(runner);
  audit_suite(runner, report);
  return report;
}

void print(std::ostream& out, const VerifyReport& report) {
  for (const auto& c : report.checks) {
    const char* tag = c.passed ? "PASS" : (c.authoritative ? "FAIL" : "NOTE");
    out << fmt::format("{} [{}] {}: {} ({:.2f} s)\n", tag, c.suite, c.name, c.detail, c.seconds);
  }
  out << "\naudit of printed closed forms against the oracle\n";
  out << fmt::format("{:>6} {:>6} {:>12} {:>16} {:>16} {:>16} {:>12}\n", "Gamma", "theta",
                     "quantity", "printed", "first_princ", "oracle", "discrepancy");
  for (const auto& r : report.audit) {
    out << fmt::format("{:6.3g} {:6.3f} {:>12} {:16.9g} {:16.9g} {:16.9g} {:12.4g}\n", r.point.Gamma,
                       r.point.theta, r.quantity, r.paper_verbatim, r.first_principles, r.oracle,
                       r.discrepancy);
  }
  out << fmt::format("\n{} authoritative failure(s)\n", report.failures());
}

}  // namespace spac::verify
