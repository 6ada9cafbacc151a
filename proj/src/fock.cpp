#include "spac/fock.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

namespace spac::fock {

void TruncationPolicy::validate() const {
  if (initial_n_max < 8) throw InvalidParameter("initial n_max must be at least 8");
  if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-6)) {
    throw InvalidParameter("tail tolerance must lie in (0, 1e-6]");
  }
  if (growth_factor < 2) throw InvalidParameter("growth factor must be at least 2");
  if (guard_band < 0) throw InvalidParameter("guard band must be nonnegative");
  if (max_n_max < initial_n_max) throw InvalidParameter("max n_max below initial n_max");
}

namespace {

double guard_band_mass(const Eigen::VectorXcd& v, int guard_band) {
  const auto n = static_cast<int>(v.size());
  const int band = std::min(guard_band, n);
  const double total = v.squaredNorm();
  if (total == 0.0 || band == 0) return 0.0;
  return v.tail(band).squaredNorm() / total;
}

}  // namespace

FockVector::FockVector(Eigen::VectorXcd amplitudes, int guard_band)
    : amplitudes_(std::move(amplitudes)), guard_band_(guard_band) {
  tail_mass_ = guard_band_mass(amplitudes_, guard_band_);
}

Complex FockVector::inner(const FockVector& other) const {
  if (other.n_max() != n_max()) throw InvalidParameter("inner product of mismatched truncations");
  return amplitudes_.dot(other.amplitudes_);  // conjugates the left operand
}

FockVector FockVector::normalized() const {
  const double n = std::sqrt(norm_sq());
  if (n == 0.0) throw InvalidParameter("cannot normalise the zero vector");
  return FockVector(amplitudes_ / n, guard_band_);
}

FockVector FockVector::scaled(Complex factor) const {
  return FockVector(amplitudes_ * factor, guard_band_);
}

void FockVector::write_csv(std::ostream& out) const {
  out << "index,re,im\n";
  const auto old = out.precision(17);
  for (int n = 0; n < n_max(); ++n) {
    out << n << ',' << amplitudes_[n].real() << ',' << amplitudes_[n].imag() << '\n';
  }
  out.precision(old);
}

FockVector FockOperator::apply(const FockVector& v, int guard_band) const {
  if (v.n_max() != n_max()) throw InvalidParameter("operator/vector truncation mismatch");
  return FockVector(matrix_ * v.amplitudes(), guard_band);
}

int default_n_max(const PointerParams& pointer, const Coupling& coupling,
                  const TruncationPolicy& policy) {
  const double reach = pointer.r() + coupling.strength() / 2.0 + 6.0;
  const auto wanted = static_cast<int>(std::ceil(reach * reach));
  return std::min(std::max(policy.initial_n_max, wanted), policy.max_n_max);
}

FockVector spac_state(const PointerParams& pointer, int n_max, const TruncationPolicy& policy) {
  if (n_max < 8) throw InvalidParameter("n_max must be at least 8");
  const Complex alpha = pointer.alpha();
  const double gamma = pointer.gamma();

  // coherent[k] = e^{-|alpha|^2/2} alpha^k / sqrt(k!); amplitude[n] = gamma sqrt(n) coherent[n-1].
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(n_max);
  Complex coherent = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 1; n < n_max; ++n) {
    amps[n] = gamma * std::sqrt(static_cast<double>(n)) * coherent;
    coherent *= alpha / std::sqrt(static_cast<double>(n));
  }
  return FockVector(std::move(amps), policy.guard_band);
}

FockVector spac_state(const PointerParams& pointer, const TruncationPolicy& policy) {
  policy.validate();
  int n = default_n_max(pointer, Coupling(0.0), policy);
  while (true) {
    auto v = spac_state(pointer, n, policy);
    if (v.converged(policy.tail_tolerance)) return v;
    if (n >= policy.max_n_max) {
      throw TruncationInsufficient("SPAC state tail above tolerance at n_max " + std::to_string(n));
    }
    n = std::min(n * policy.growth_factor, policy.max_n_max);
  }
}

namespace {

// Normalised Laguerre functions along one diagonal of D(mu):
//   ell_n = sqrt(n! / (n+k)!) e^{-x/2} x^{k/2} L_n^{(k)}(x),   x = |mu|^2,
// so that <n+k|D(mu)|n> = e^{i k arg mu} ell_n. The three-term recurrence
//   sqrt((n+1)(n+k+1)) ell_{n+1} = (2n+1+k-x) ell_n - sqrt(n(n+k)) ell_{n-1}
// is run on rescaled values with a separate log scale, so diagonals whose
// leading element underflows are still resolved.
void laguerre_diagonal(double x, int k, int count, std::vector<double>& out) {
  out.assign(count, 0.0);
  if (count == 0) return;
  if (x == 0.0) {
    if (k == 0) std::fill(out.begin(), out.end(), 1.0);
    return;
  }
  double log_scale = -x / 2.0 + 0.5 * k * std::log(x) - 0.5 * std::lgamma(k + 1.0);
  double prev = 0.0;
  double cur = 1.0;
  double factor = std::exp(log_scale);
  auto emit = [&](int n, double v) {
    if (log_scale > -700.0) {
      out[n] = v * factor;
      return;
    }
    const double lg = log_scale + std::log(std::abs(v));
    out[n] = (v == 0.0 || lg < -745.0) ? 0.0 : std::copysign(std::exp(lg), v);
  };
  emit(0, cur);
  for (int n = 0; n + 1 < count; ++n) {
    const double next = ((2.0 * n + 1.0 + k - x) * cur - std::sqrt(n * (n + k + 0.0)) * prev) /
                        std::sqrt((n + 1.0) * (n + k + 1.0));
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(prev), std::abs(cur));
    if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
      factor = std::exp(log_scale);
    }
    emit(n + 1, cur);
  }
}

}  // namespace

FockOperator displacement_operator(Complex mu, int n_max) {
  if (n_max < 8) throw InvalidParameter("n_max must be at least 8");
  checked(mu, "displacement");
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n_max, n_max);
  const double x = std::norm(mu);
  const double arg = std::arg(mu);

  std::vector<double> ell;
  for (int k = 0; k < n_max; ++k) {
    laguerre_diagonal(x, k, n_max - k, ell);
    const Complex below = std::polar(1.0, k * arg);                       // <n+k|D|n>
    const Complex above = (k % 2 == 0 ? 1.0 : -1.0) * std::conj(below);  // <n|D|n+k>
    for (int n = 0; n + k < n_max; ++n) {
      d(n + k, n) = below * ell[n];
      if (k > 0) d(n, n + k) = above * ell[n];
    }
  }
  return FockOperator(std::move(d), "displacement");
}

int safe_dimension(Complex mu, int n_max, int guard_band) {
  // A displaced number state D(mu)|n> occupies photon numbers up to about
  // (sqrt(n) + |mu|)^2; keep a margin of six in amplitude units.
  const double edge = std::sqrt(static_cast<double>(std::max(n_max - guard_band, 0)));
  const double reach = edge - std::abs(mu) - 6.0;
  if (std::abs(mu) == 0.0) return std::max(n_max - guard_band, 0);
  if (reach <= 0.0) return 0;
  return std::min(static_cast<int>(std::floor(reach * reach)) + 1, n_max - guard_band);
}

FockOperator annihilation_operator(int n_max) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_max, n_max);
  for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return FockOperator(std::move(a), "a");
}

FockOperator creation_operator(int n_max) {
  return FockOperator(annihilation_operator(n_max).matrix().adjoint(), "a^dagger");
}

FockOperator position_operator(int n_max, double sigma) {
  const auto a = annihilation_operator(n_max).matrix();
  return FockOperator(sigma * (a + a.adjoint()), "X");
}

FockOperator momentum_operator(int n_max, double sigma) {
  const auto a = annihilation_operator(n_max).matrix();
  return FockOperator(Complex(0.0, 1.0 / (2.0 * sigma)) * (a.adjoint() - a), "P");
}

namespace {

// <+-x|psi_i> <up_z|+-x> for the two sigma_x eigenbranches.
struct BranchWeights {
  Complex plus;
  Complex minus;
};

BranchWeights postselected_weights(const SelectionParams& sel) {
  const Complex up = sel.postselected_amplitude();
  const Complex down = sel.orthogonal_amplitude();
  return {(up + down) / 2.0, (up - down) / 2.0};
}

struct Branches {
  FockVector initial;
  FockVector plus;   // D(+Gamma/2)|phi>
  FockVector minus;  // D(-Gamma/2)|phi>
  double tail_mass = 0.0;
};

Branches displaced_branches(const PointerParams& pointer, const Coupling& coupling, int n_max,
                            const TruncationPolicy& policy) {
  policy.validate();
  const double half = coupling.strength() / 2.0;
  Branches b{spac_state(pointer, n_max, policy), {}, {}, 0.0};
  b.plus = displacement_operator(Complex(half, 0.0), n_max).apply(b.initial, policy.guard_band);
  b.minus = displacement_operator(Complex(-half, 0.0), n_max).apply(b.initial, policy.guard_band);
  b.tail_mass = std::max({b.initial.tail_mass(), b.plus.tail_mass(), b.minus.tail_mass()});
  return b;
}

void require_postselectable(const SelectionParams& sel) {
  if (!sel.postselectable()) {
    throw OrthogonalSelection("postselected state is orthogonal to the preselected state");
  }
}

FockVector combine(Complex wa, const FockVector& a, Complex wb, const FockVector& b, int guard) {
  return FockVector(wa * a.amplitudes() + wb * b.amplitudes(), guard);
}

FinalState final_from_branches(const SelectionParams& sel, const Branches& b, int guard) {
  const auto w = postselected_weights(sel);
  const FockVector projected = combine(w.plus, b.plus, w.minus, b.minus, guard);
  FinalState out;
  out.success_probability = projected.norm_sq();
  out.state = projected.normalized();
  const double c = sel.postselected_amplitude();
  out.beta_sq_inv = 2.0 * out.success_probability / (c * c);
  return out;
}

template <class Fn>
auto grow_until_converged(const PointerParams& pointer, const Coupling& coupling,
                          const TruncationPolicy& policy, Fn&& attempt) {
  policy.validate();
  int n = default_n_max(pointer, coupling, policy);
  while (true) {
    auto result = attempt(n);
    if (result.tail_mass < policy.tail_tolerance) return result;
    if (n >= policy.max_n_max) {
      throw TruncationInsufficient("displaced pointer tail above tolerance at n_max " +
                                   std::to_string(n));
    }
    n = std::min(n * policy.growth_factor, policy.max_n_max);
  }
}

}  // namespace

FinalState assemble_final_state(const SelectionParams& sel, const PointerParams& pointer,
                                const Coupling& coupling, int n_max,
                                const TruncationPolicy& policy) {
  require_postselectable(sel);
  const auto b = displaced_branches(pointer, coupling, n_max, policy);
  return final_from_branches(sel, b, policy.guard_band);
}

FinalState assemble_final_state(const SelectionParams& sel, const PointerParams& pointer,
                                const Coupling& coupling, const TruncationPolicy& policy) {
  require_postselectable(sel);
  struct Attempt {
    FinalState value;
    double tail_mass;
  };
  auto r = grow_until_converged(pointer, coupling, policy, [&](int n) {
    const auto b = displaced_branches(pointer, coupling, n, policy);
    return Attempt{final_from_branches(sel, b, policy.guard_band), b.tail_mass};
  });
  return r.value;
}

FockVector sigma_branch_state(const SelectionParams& sel, const PointerParams& pointer,
                              const Coupling& coupling, int n_max,
                              const TruncationPolicy& policy) {
  require_postselectable(sel);
  const auto b = displaced_branches(pointer, coupling, n_max, policy);
  const auto w = postselected_weights(sel);
  return combine(w.plus, b.plus, -w.minus, b.minus, policy.guard_band);
}

Moments moments(const FockVector& state, const PointerParams& pointer) {
  const auto& v = state.amplitudes();
  const int n_max = state.n_max();
  const double norm = v.squaredNorm();
  if (norm == 0.0) throw InvalidParameter("moments of the zero vector");

  Complex mean_a = 0.0;
  Complex mean_a2 = 0.0;
  double mean_n = 0.0;
  for (int n = 0; n < n_max; ++n) {
    const Complex vn = std::conj(v[n]);
    mean_n += n * std::norm(v[n]);
    if (n + 1 < n_max) mean_a += vn * std::sqrt(n + 1.0) * v[n + 1];
    if (n + 2 < n_max) mean_a2 += vn * std::sqrt((n + 1.0) * (n + 2.0)) * v[n + 2];
  }
  mean_a /= norm;
  mean_a2 /= norm;
  mean_n /= norm;

  const double s = pointer.sigma();
  Moments m;
  m.mean_x = 2.0 * s * mean_a.real();
  m.mean_p = mean_a.imag() / s;
  m.mean_x2 = s * s * (2.0 * mean_a2.real() + 2.0 * mean_n + 1.0);
  m.mean_p2 = (2.0 * mean_n + 1.0 - 2.0 * mean_a2.real()) / (4.0 * s * s);
  m.sym_xp = 2.0 * mean_a2.imag();
  return m;
}

Complex commutator_expectation(const FockVector& state, const PointerParams& pointer) {
  const auto x = position_operator(state.n_max(), pointer.sigma()).matrix();
  const auto p = momentum_operator(state.n_max(), pointer.sigma()).matrix();
  const auto& v = state.amplitudes();
  const Eigen::VectorXcd xpv = x * (p * v);
  const Eigen::VectorXcd pxv = p * (x * v);
  return v.dot(xpv - pxv) / v.squaredNorm();
}

NonpostselectedMoments nonpostselected_moments(const SelectionParams& sel,
                                               const PointerParams& pointer,
                                               const Coupling& coupling,
                                               const TruncationPolicy& policy) {
  const Complex up = sel.postselected_amplitude();
  const Complex down = sel.orthogonal_amplitude();
  const double p_plus = std::norm(up + down) / 2.0;
  const double p_minus = std::norm(up - down) / 2.0;

  struct Attempt {
    NonpostselectedMoments value;
    double tail_mass;
  };
  auto r = grow_until_converged(pointer, coupling, policy, [&](int n) {
    const auto b = displaced_branches(pointer, coupling, n, policy);
    const auto mp = moments(b.plus, pointer);
    const auto mm = moments(b.minus, pointer);
    NonpostselectedMoments out;
    out.mean_x = p_plus * mp.mean_x + p_minus * mm.mean_x;
    out.mean_x2 = p_plus * mp.mean_x2 + p_minus * mm.mean_x2;
    out.n_max = n;
    out.tail_mass = b.tail_mass;
    return Attempt{out, b.tail_mass};
  });
  return r.value;
}

Evaluation evaluate(const SelectionParams& sel, const PointerParams& pointer,
                    const Coupling& coupling, int n_max, const TruncationPolicy& policy) {
  require_postselectable(sel);
  const auto b = displaced_branches(pointer, coupling, n_max, policy);
  const auto fin = final_from_branches(sel, b, policy.guard_band);
  const auto w = postselected_weights(sel);
  const FockVector sigma_branch = combine(w.plus, b.plus, -w.minus, b.minus, policy.guard_band);

  Evaluation e;
  e.beta_sq_inv = fin.beta_sq_inv;
  e.success_probability = fin.success_probability;
  // Psi' is normalised by the same postselected amplitude norm as Phi.
  e.transition_value = fin.state.inner(sigma_branch) / std::sqrt(fin.success_probability);
  e.initial = moments(b.initial, pointer);
  e.final = moments(fin.state, pointer);
  e.dx = e.final.mean_x - e.initial.mean_x;
  e.dp = e.final.mean_p - e.initial.mean_p;
  e.n_max = n_max;
  e.tail_mass = b.tail_mass;
  return e;
}

int adaptive_n_max(const PointerParams& pointer, const Coupling& coupling,
                   const TruncationPolicy& policy) {
  struct Attempt {
    int n;
    double tail_mass;
  };
  return grow_until_converged(pointer, coupling, policy, [&](int n) {
           const auto b = displaced_branches(pointer, coupling, n, policy);
           return Attempt{n, b.tail_mass};
         }).n;
}

Evaluation evaluate(const SelectionParams& sel, const PointerParams& pointer,
                    const Coupling& coupling, const TruncationPolicy& policy) {
  require_postselectable(sel);
  return grow_until_converged(pointer, coupling, policy,
                              [&](int n) { return evaluate(sel, pointer, coupling, n, policy); });
}

namespace {

double relative_change(double a, double b, double unit) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), unit});
}

}  // namespace

Certificate certified_evaluate(const SelectionParams& sel, const PointerParams& pointer,
                               const Coupling& coupling, const TruncationPolicy& policy) {
  Certificate c;
  c.value = evaluate(sel, pointer, coupling, policy);
  c.doubled_n_max = c.value.n_max * 2;
  const auto twice = evaluate(sel, pointer, coupling, c.doubled_n_max, policy);

  const double s = pointer.sigma();
  const auto& a = c.value;
  const double changes[] = {
      relative_change(a.beta_sq_inv, twice.beta_sq_inv, 1.0),
      relative_change(a.transition_value.real(), twice.transition_value.real(), 1.0),
      relative_change(a.transition_value.imag(), twice.transition_value.imag(), 1.0),
      relative_change(a.dx, twice.dx, s),
      relative_change(a.dp, twice.dp, 1.0 / s),
      relative_change(a.final.mean_x2, twice.final.mean_x2, s * s),
      relative_change(a.final.mean_p2, twice.final.mean_p2, 1.0 / (s * s)),
  };
  c.max_relative_change = *std::max_element(std::begin(changes), std::end(changes));
  return c;
}

}  // namespace spac::fock
