#ifndef SPAC_ANALYTIC_HPP
#define SPAC_ANALYTIC_HPP

// Closed-form engine for the postselected SPAC pointer.
//
// Everything here is assembled from two displaced-state kernels of the
// SPAC state |phi> = gamma a^dagger |alpha>:
//
//   K0(mu) = <phi| D(mu) |phi>,    K1(mu) = <phi| D(mu) a |phi>.
//
// The unitary exp(-i g sigma_x P) splits into D(+Gamma/2) on the sigma_x = +1
// branch and D(-Gamma/2) on the -1 branch, so every moment of the normalised
// postselected pointer state reduces to K0(+-Gamma) and K1(+-Gamma).

#include "spac/model.hpp"

namespace spac::analytic {

struct KernelSet {
  Complex k0;
  Complex k1;
  Complex mu;
};

struct ShiftResult {
  double dx = 0.0;  // position units
  double dp = 0.0;  // momentum units (hbar = 1)
  Complex transition_value;
  double beta_sq_inv = 0.0;
};

struct WeakLimitShifts {
  double wx = 0.0;
  double wp = 0.0;
};

struct Variances {
  double var_x = 0.0;
  double var_p = 0.0;
};

/// Normalisation beta^{-2} of the postselected pointer state, from the
/// h(Gamma) closed form.
double beta_inverse_sq(const SelectionParams& sel, const PointerParams& pointer,
                       const Coupling& coupling);

/// Same quantity assembled from K0(-Gamma); kept as an independent route.
double beta_inverse_sq_from_kernels(const SelectionParams& sel, const PointerParams& pointer,
                                    const Coupling& coupling);

/// h(Gamma) = e^{-Gamma^2/2} (1 + (alpha^* + Gamma)(alpha - Gamma)) e^{2 i Gamma Im alpha}.
/// Satisfies gamma^2 h(Gamma) = K0(-Gamma).
Complex h_kernel(const PointerParams& pointer, const Coupling& coupling);

/// The f(Gamma) cross-term kernel of the printed shift expressions, for a
/// signed Gamma (the printed formulas use both f(Gamma) and f(-Gamma)).
Complex f_kernel(const PointerParams& pointer, double signed_gamma);
Complex f_kernel(const PointerParams& pointer, const Coupling& coupling);

/// K0(mu) and K1(mu) in closed form.
KernelSet displaced_kernels(const PointerParams& pointer, Complex mu);

/// <phi| a |phi> = gamma^2 alpha (2 + |alpha|^2).
Complex initial_mean_a(const PointerParams& pointer);

/// Transition value of sigma_x: the weak value at Gamma -> 0 and the ABL
/// conditional value at Gamma -> infinity.
Complex transition_value(const SelectionParams& sel, const PointerParams& pointer,
                         const Coupling& coupling);

/// Exact position and momentum shifts of the postselected pointer.
ShiftResult pointer_shifts(const SelectionParams& sel, const PointerParams& pointer,
                           const Coupling& coupling);

/// First-order (weak coupling) shifts W_x and W_p.
WeakLimitShifts weak_limit_shifts(const SelectionParams& sel, const PointerParams& pointer,
                                  const Coupling& coupling);

/// Var(X) and Var(P) in the initial SPAC state.
Variances initial_variances(const PointerParams& pointer);

/// d Var(X) / d theta, analytic.
double variance_x_theta_derivative(const PointerParams& pointer);

/// Coefficient of g Im(A_w) in W_x, i.e. -dVar(X)/dtheta / (2 sigma^2).
/// Equals (<XP + PX> - 2 <X><P>) / hbar in the initial state.
double imaginary_response_coefficient(const PointerParams& pointer);

}  // namespace spac::analytic

#endif  // SPAC_ANALYTIC_HPP
