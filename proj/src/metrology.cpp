#include "spac/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spac/analytic.hpp"

namespace spac::metrology {

namespace {

constexpr double kDegenerateShift = 1e-12;

void require_trials(long long N) {
  if (N < 1) throw InvalidParameter("number of trials N must be positive");
}

}  // namespace

double cramer_rao_bound(double F_Q, long long N) {
  require_trials(N);
  if (!(F_Q > 0.0)) throw InvalidParameter("Cramer-Rao bound needs positive Fisher information");
  return 1.0 / (static_cast<double>(N) * F_Q);
}

SnrReport snr_ratio(const SelectionParams& sel, const PointerParams& pointer,
                    const Coupling& coupling, long long N, const fock::TruncationPolicy& policy) {
  require_trials(N);
  if (!sel.postselectable()) {
    throw OrthogonalSelection("postselection probability vanishes; R_p undefined");
  }
  if (std::abs(std::sin(sel.phi()) * std::cos(sel.delta())) < kDegenerateShift) {
    throw DegenerateReference("nonpostselected shift g sin(phi) cos(delta) is zero; chi undefined");
  }
  if (coupling.strength() == 0.0) {
    throw DegenerateReference("no coupling: both shifts vanish and chi is undefined");
  }

  const auto post = fock::evaluate(sel, pointer, coupling, policy);
  const auto non = fock::nonpostselected_moments(sel, pointer, coupling, policy);

  SnrReport s;
  s.N_trials = N;
  s.P_s = postselection_probability(sel);
  s.dx = post.dx;
  s.dx_analytic = analytic::pointer_shifts(sel, pointer, coupling).dx;
  s.Dx = std::sqrt(std::max(post.final.var_x(), 0.0));
  s.dx_prime = non.mean_x - post.initial.mean_x;
  s.Dx_prime = std::sqrt(std::max(non.var_x(), 0.0));
  s.exact_success_probability = post.success_probability;
  s.n_max = std::max(post.n_max, non.n_max);
  s.tail_mass = std::max(post.tail_mass, non.tail_mass);

  const double n = static_cast<double>(N);
  s.R_p = std::sqrt(n * s.P_s) * s.dx / s.Dx;
  s.R_n = std::sqrt(n) * s.dx_prime / s.Dx_prime;
  s.chi = s.R_p / s.R_n;
  return s;
}

namespace {

// Rotates v so that <reference|v> is real and nonnegative.
Eigen::VectorXcd aligned(const fock::FockVector& reference, const fock::FockVector& v) {
  const Complex overlap = reference.inner(v);
  const double mag = std::abs(overlap);
  if (mag == 0.0) return v.amplitudes();
  return v.amplitudes() * (std::conj(overlap) / mag);
}

FamilyFisher estimate(const StateFamily& family, double at, double h) {
  const auto f0 = family(at);
  const auto fp = family(at + h);
  const auto fm = family(at - h);
  const auto fp2 = family(at + h / 2.0);
  const auto fm2 = family(at - h / 2.0);

  const Eigen::VectorXcd vp = aligned(f0, fp);
  const Eigen::VectorXcd vm = aligned(f0, fm);
  const Eigen::VectorXcd d_coarse = (vp - vm) / (2.0 * h);
  const Eigen::VectorXcd d_fine = (aligned(f0, fp2) - aligned(f0, fm2)) / h;
  const Eigen::VectorXcd d = (4.0 * d_fine - d_coarse) / 3.0;

  const auto& v0 = f0.amplitudes();
  FamilyFisher out;
  out.step = h;
  out.F = 4.0 * (d.squaredNorm() - std::norm(v0.dot(d)));
  // 1 - |<a|b>| = ||a - b~||^2 / 2 for unit vectors with b~ phase aligned;
  // averaging both sides cancels the odd-order error.
  const double infidelity = 0.5 * ((v0 - vp).squaredNorm() + (v0 - vm).squaredNorm()) / 2.0;
  out.F_fidelity = 8.0 * infidelity / (h * h);
  return out;
}

bool estimators_agree(const FamilyFisher& f) {
  const double scale = std::max(std::abs(f.F), std::abs(f.F_fidelity));
  return std::abs(f.F - f.F_fidelity) <= kQfiAgreement * scale + 1e-9;
}

}  // namespace

FamilyFisher family_qfi(const StateFamily& family, double at, double step) {
  if (!(step > 0.0)) throw InvalidParameter("finite-difference step must be positive");
  auto first = estimate(family, at, step);
  if (estimators_agree(first)) return first;
  auto refined = estimate(family, at, step / 2.0);
  if (estimators_agree(refined)) return refined;
  throw StepTooCoarse("QFI estimators disagree: derivative form " + std::to_string(refined.F) +
                      ", fidelity form " + std::to_string(refined.F_fidelity));
}

FisherReport qfi(const SelectionParams& sel, const PointerParams& pointer,
                 const Coupling& coupling, double step, long long N,
                 const fock::TruncationPolicy& policy) {
  require_trials(N);
  if (!sel.postselectable()) {
    throw OrthogonalSelection("postselection probability vanishes; QFI undefined");
  }
  const double G = coupling.strength();
  if (!(step > 0.0) || G < step) {
    throw InvalidParameter("QFI needs 0 < step <= Gamma");
  }

  // One truncation for every neighbour, sized for the largest displacement.
  const int n_max = fock::adaptive_n_max(pointer, Coupling(G + step), policy);
  double tail = 0.0;
  const StateFamily family = [&](double gamma) {
    auto fin = fock::assemble_final_state(sel, pointer, Coupling(gamma), n_max, policy);
    tail = std::max(tail, fin.state.tail_mass());
    return fin.state;
  };
  const auto f = family_qfi(family, G, step);

  FisherReport rep;
  rep.F = f.F;
  rep.F_fidelity = f.F_fidelity;
  rep.step = f.step;
  rep.F_Q = postselection_probability(sel) * f.F;
  rep.N_trials = N;
  rep.crb = rep.F_Q > 0.0 ? cramer_rao_bound(rep.F_Q, N) : INFINITY;
  rep.n_max = n_max;
  rep.tail_mass = tail;
  return rep;
}

}  // namespace spac::metrology
