#include "spac/analytic.hpp"

#include <cmath>

namespace spac::analytic {

namespace {

// Below this magnitude Gaussian-damped terms are flushed to zero.
constexpr double kLogFlush = -690.7755278982137;  // log(1e-300)

// exp(log_gauss + i phase) * poly, evaluated in log space so that very large
// Gamma underflows to an exact zero instead of 0 * inf.
Complex damped(double log_gauss, double phase, Complex poly) {
  const double mag = std::abs(poly);
  if (mag == 0.0) return {0.0, 0.0};
  const double log_total = log_gauss + std::log(mag);
  if (log_total < kLogFlush) return {0.0, 0.0};
  return std::polar(std::exp(log_total), phase + std::arg(poly));
}

struct Branches {
  Complex plus;   // 1 + A_w
  Complex minus;  // 1 - A_w
  double norm_a_sq;
};

Branches branches(const SelectionParams& sel) {
  const Complex aw = weak_value(sel);
  return {1.0 + aw, 1.0 - aw, std::norm(aw)};
}

}  // namespace

Complex h_kernel(const PointerParams& pointer, const Coupling& coupling) {
  const double G = coupling.strength();
  const Complex alpha = pointer.alpha();
  const Complex poly = 1.0 + (std::conj(alpha) + G) * (alpha - G);
  return damped(-G * G / 2.0, 2.0 * G * alpha.imag(), poly);
}

Complex f_kernel(const PointerParams& pointer, double G) {
  const Complex alpha = pointer.alpha();
  const double mod2 = std::norm(alpha);
  const Complex poly = 2.0 * alpha * (2.0 + mod2) + 3.0 * G * pointer.gamma_inv_sq() -
                       2.0 * alpha * alpha * G + G * G * (std::conj(alpha) - 3.0 * alpha);
  return damped(-G * G / 2.0, -2.0 * G * alpha.imag(), poly);
}

Complex f_kernel(const PointerParams& pointer, const Coupling& coupling) {
  return f_kernel(pointer, coupling.strength());
}

KernelSet displaced_kernels(const PointerParams& pointer, Complex mu) {
  // D(mu) a^dagger = (a^dagger - mu^*) D(mu) and D(mu)|alpha> = e^{i Im(mu alpha^*)}|alpha + mu>
  // give <alpha|D(mu)|alpha> = exp(-|mu|^2/2 + 2i Im(alpha^* mu)) =: E and
  //   K0 = gamma^2 E (1 + (alpha^* - mu^*)(alpha + mu)),
  //   K1 = gamma^2 (alpha + mu) E + alpha K0    (using a a^dagger|alpha> = (1 + alpha a^dagger)|alpha>).
  const Complex alpha = pointer.alpha();
  const double g2 = 1.0 / pointer.gamma_inv_sq();
  const double log_gauss = -std::norm(mu) / 2.0;
  const double phase = 2.0 * (std::conj(alpha) * mu).imag();

  const Complex k0 = g2 * damped(log_gauss, phase, 1.0 + (std::conj(alpha) - std::conj(mu)) * (alpha + mu));
  const Complex k1 = g2 * damped(log_gauss, phase, alpha + mu) + alpha * k0;
  return {k0, k1, mu};
}

Complex initial_mean_a(const PointerParams& pointer) {
  const Complex alpha = pointer.alpha();
  return alpha * (2.0 + std::norm(alpha)) / pointer.gamma_inv_sq();
}

double beta_inverse_sq(const SelectionParams& sel, const PointerParams& pointer,
                       const Coupling& coupling) {
  const auto b = branches(sel);
  const double g2 = 1.0 / pointer.gamma_inv_sq();
  const Complex cross = std::conj(b.plus) * b.minus * h_kernel(pointer, coupling);
  return 1.0 + b.norm_a_sq + g2 * cross.real();
}

double beta_inverse_sq_from_kernels(const SelectionParams& sel, const PointerParams& pointer,
                                    const Coupling& coupling) {
  const auto b = branches(sel);
  const auto k = displaced_kernels(pointer, Complex(-coupling.strength(), 0.0));
  // ||(1+A) D(G/2) phi + (1-A) D(-G/2) phi||^2 / 2; D(G/2)^dagger D(-G/2) = D(-G).
  const Complex cross = std::conj(b.plus) * b.minus * k.k0;
  return 0.5 * (std::norm(b.plus) + std::norm(b.minus)) + cross.real();
}

Complex transition_value(const SelectionParams& sel, const PointerParams& pointer,
                         const Coupling& coupling) {
  const auto b = branches(sel);
  const double g2 = 1.0 / pointer.gamma_inv_sq();
  const Complex h = h_kernel(pointer, coupling);
  const double beta_sq = 1.0 / beta_inverse_sq(sel, pointer, coupling);
  const Complex aw = 1.0 - b.minus;
  const Complex bracket = 4.0 * aw.real() - g2 * std::conj(b.plus) * b.minus * h +
                          g2 * std::conj(b.minus) * b.plus * std::conj(h);
  return checked(0.5 * beta_sq * bracket, "transition value");
}

ShiftResult pointer_shifts(const SelectionParams& sel, const PointerParams& pointer,
                           const Coupling& coupling) {
  const auto b = branches(sel);
  const double G = coupling.strength();
  const Complex a0 = initial_mean_a(pointer);

  // D(-G/2) a D(-G/2) = D(-G)(a - G/2), D(G/2) a D(G/2) = D(G)(a + G/2).
  const auto km = displaced_kernels(pointer, Complex(-G, 0.0));
  const auto kp = displaced_kernels(pointer, Complex(G, 0.0));
  const Complex cross_pm = std::conj(b.plus) * b.minus * (km.k1 - 0.5 * G * km.k0);
  const Complex cross_mp = std::conj(b.minus) * b.plus * (kp.k1 + 0.5 * G * kp.k0);

  const double pp = std::norm(b.plus);
  const double mm = std::norm(b.minus);
  const double norm_half = 0.5 * (pp + mm) + (std::conj(b.plus) * b.minus * km.k0).real();

  const Complex unnormalised = pp * (a0 + 0.5 * G) + mm * (a0 - 0.5 * G) + cross_pm + cross_mp;
  const Complex final_mean_a = unnormalised / (2.0 * norm_half);
  const Complex shift = final_mean_a - a0;

  ShiftResult out;
  out.dx = 2.0 * pointer.sigma() * shift.real();
  out.dp = shift.imag() / pointer.sigma();
  out.transition_value = transition_value(sel, pointer, coupling);
  out.beta_sq_inv = norm_half;
  checked(Complex(out.dx, out.dp), "pointer shifts");
  return out;
}

double variance_x_theta_derivative(const PointerParams& pointer) {
  const double g2 = 1.0 / pointer.gamma_inv_sq();
  const double s = pointer.sigma();
  return 4.0 * s * s * g2 * g2 * pointer.r() * pointer.r() * std::sin(2.0 * pointer.theta());
}

double imaginary_response_coefficient(const PointerParams& pointer) {
  const double s = pointer.sigma();
  return -variance_x_theta_derivative(pointer) / (2.0 * s * s);
}

Variances initial_variances(const PointerParams& pointer) {
  const double g2 = 1.0 / pointer.gamma_inv_sq();
  const double r2 = pointer.r() * pointer.r();
  const double s = pointer.sigma();
  const double sn = std::sin(pointer.theta());
  const double cs = std::cos(pointer.theta());
  Variances v;
  v.var_x = s * s * g2 * g2 * (3.0 + 4.0 * r2 * sn * sn + r2 * r2);
  v.var_p = g2 * g2 * (3.0 + 4.0 * r2 * cs * cs + r2 * r2) / (4.0 * s * s);
  return v;
}

WeakLimitShifts weak_limit_shifts(const SelectionParams& sel, const PointerParams& pointer,
                                  const Coupling& coupling) {
  const Complex aw = weak_value(sel);
  const double g = coupling.g(pointer);
  WeakLimitShifts w;
  w.wx = g * aw.real() + g * imaginary_response_coefficient(pointer) * aw.imag();
  w.wp = 2.0 * g * initial_variances(pointer).var_p * aw.imag();
  return w;
}

}  // namespace spac::analytic
