#include "spac/audit.hpp"

#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "spac/analytic.hpp"

namespace spac::audit {

PrintedValues printed_values(const SelectionParams& sel, const PointerParams& pointer,
                             const Coupling& coupling) {
  const Complex aw = weak_value(sel);
  const Complex plus = 1.0 + aw;
  const Complex minus = 1.0 - aw;
  const Complex alpha = pointer.alpha();
  const double G = coupling.strength();
  const double g2 = 1.0 / pointer.gamma_inv_sq();
  const double gi2 = pointer.gamma_inv_sq();
  const double mod2 = std::norm(alpha);
  const double s = pointer.sigma();
  const Complex I(0.0, 1.0);

  PrintedValues out;
  const Complex beta_cross = std::conj(plus) * minus * (gi2 - G * G + 2.0 * I * alpha.imag()) *
                             std::exp(2.0 * G * I * alpha.imag());
  out.beta_sq_inv = 1.0 + std::norm(aw) + g2 * std::exp(-G * G / 2.0) * beta_cross.real();
  const double beta_sq = 1.0 / out.beta_sq_inv;

  const Complex f_neg = analytic::f_kernel(pointer, -G);
  const Complex f_pos = analytic::f_kernel(pointer, G);
  const Complex cross_neg = std::conj(plus) * minus * f_neg;
  const Complex cross_pos = std::conj(minus) * plus * f_pos;

  const double re_a = alpha.real();
  const double im_a = alpha.imag();
  const double brace_x = std::norm(plus) * (G * gi2 + 4.0 * re_a + 2.0 * re_a * mod2) +
                         std::norm(minus) * (-G * gi2 + 4.0 * re_a + 2.0 * re_a * mod2) +
                         cross_neg.real() + cross_pos.real();
  out.dx = s * beta_sq * g2 * brace_x - 2.0 * s * g2 * (2.0 + mod2) * re_a;

  const double brace_p = std::norm(plus) * (G * gi2 + 4.0 * im_a + 2.0 * im_a * mod2) +
                         std::norm(minus) * (-G * gi2 + 4.0 * im_a + 2.0 * im_a * mod2) +
                         cross_neg.imag() + cross_pos.imag();
  out.dp = beta_sq * g2 * brace_p / (2.0 * s) - g2 * (2.0 + mod2) * im_a / s;
  return out;
}

std::vector<ParameterRecord> default_audit_points() {
  std::vector<ParameterRecord> points;
  const double ladder[] = {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  for (double G : ladder) {
    ParameterRecord p;  // phi = delta = theta = pi/6, r = 2
    p.Gamma = G;
    points.push_back(p);
  }
  for (double G : {0.0, 1.0, 20.0}) {
    ParameterRecord p;
    p.theta = kPi / 2.0;
    p.Gamma = G;
    points.push_back(p);
  }
  return points;
}

std::vector<AuditRecord> audit_table(const std::vector<ParameterRecord>& points,
                                     const fock::TruncationPolicy& policy) {
  std::vector<AuditRecord> rows;
  for (const auto& p : points) {
    const auto sel = p.selection();
    const auto ptr = p.pointer();
    const auto cpl = p.coupling();
    const auto printed = printed_values(sel, ptr, cpl);
    const auto exact = analytic::pointer_shifts(sel, ptr, cpl);
    const auto oracle = fock::evaluate(sel, ptr, cpl, policy);

    auto add = [&](const char* name, double verbatim, double first, double orc) {
      rows.push_back({p, name, verbatim, first, orc, std::abs(verbatim - orc)});
    };
    add("beta_inv_sq", printed.beta_sq_inv, exact.beta_sq_inv, oracle.beta_sq_inv);
    add("dx", printed.dx, exact.dx, oracle.dx);
    add("dp", printed.dp, exact.dp, oracle.dp);
  }
  return rows;
}

void write_audit_csv(std::ostream& out, const std::vector<AuditRecord>& records) {
  out << "phi[rad],delta[rad],r[1],theta[rad],sigma[pos],Gamma[1],quantity,"
         "paper_verbatim,first_principles,oracle,discrepancy\n";
  for (const auto& rec : records) {
    const auto& p = rec.point;
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       p.phi, p.delta, p.r, p.theta, p.sigma, p.Gamma, rec.quantity,
                       rec.paper_verbatim, rec.first_principles, rec.oracle, rec.discrepancy);
  }
}

}  // namespace spac::audit
