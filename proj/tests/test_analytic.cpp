#include <doctest.h>

#include <cmath>

#include "spac/analytic.hpp"
#include "spac/fock.hpp"

using namespace spac;

namespace {

const fock::TruncationPolicy kPolicy{};

// <phi| D(mu) B |phi> by brute-force linear algebra at a generous truncation.
Complex fock_k0(const PointerParams& p, Complex mu) {
  const int n = 200;
  const auto phi = fock::spac_state(p, n, kPolicy);
  return phi.inner(fock::displacement_operator(mu, n).apply(phi, 8));
}

Complex fock_k1(const PointerParams& p, Complex mu) {
  const int n = 200;
  const auto phi = fock::spac_state(p, n, kPolicy);
  const auto a_phi = fock::annihilation_operator(n).apply(phi, 8);
  return phi.inner(fock::displacement_operator(mu, n).apply(a_phi, 8));
}

}  // namespace

TEST_CASE("beta^-2 at Gamma = 0 is 2") {
  for (double phi : {0.1, 1.0, 2.5})
    for (double delta : {0.0, 1.0, 4.0})
      for (double r : {0.0, 1.0, 3.0})
        for (double theta : {0.0, kPi / 6, 2.0}) {
          const double b = analytic::beta_inverse_sq(SelectionParams(phi, delta), PointerParams(r, theta), Coupling(0.0));
          CHECK(b == doctest::Approx(2.0).epsilon(1e-13));
        }
}

TEST_CASE("beta^-2 at Gamma = 20 is 1 + |A|^2") {
  for (double phi : {0.2, 1.5, 3.0})
    for (double r : {0.0, 2.0, 5.0}) {
      const SelectionParams s(phi, kPi / 6);
      const double b = analytic::beta_inverse_sq(s, PointerParams(r, kPi / 6), Coupling(20.0));
      CHECK(std::abs(b - (1.0 + std::norm(weak_value(s)))) < 1e-12 * b);
    }
}

TEST_CASE("beta^-2 matches the oracle norm") {
  const SelectionParams s(kPi / 6, kPi / 6);
  const PointerParams p(2.0, kPi / 6);
  const double a = analytic::beta_inverse_sq(s, p, Coupling(1.0));
  const auto fin = fock::assemble_final_state(s, p, Coupling(1.0), kPolicy);
  CHECK(std::abs(a - fin.beta_sq_inv) < 1e-10 * a);
  CHECK(std::abs(a - analytic::beta_inverse_sq_from_kernels(s, p, Coupling(1.0))) < 1e-13);
  CHECK(a > 0.0);
}

TEST_CASE("h kernel") {
  const PointerParams p(2.0, kPi / 6);
  CHECK(std::abs(analytic::h_kernel(p, Coupling(0.0)) - 5.0) < 1e-14);
  CHECK(std::abs(analytic::h_kernel(PointerParams(0.0, 0.0), Coupling(1.0))) < 1e-15);
  // gamma^2 h(Gamma) = <phi|D(-Gamma)|phi>
  const Complex h = analytic::h_kernel(p, Coupling(0.5));
  CHECK(std::abs(h / p.gamma_inv_sq() - fock_k0(p, -0.5)) < 1e-10);
}

TEST_CASE("f kernel as printed") {
  CHECK(std::abs(analytic::f_kernel(PointerParams(0.0, 0.0), Coupling(0.0))) == 0.0);
  CHECK(std::abs(analytic::f_kernel(PointerParams(0.0, 0.0), Coupling(1.0)) - 3.0 * std::exp(-0.5)) < 1e-14);
  CHECK(std::abs(analytic::f_kernel(PointerParams(0.0, 0.0), Coupling(1.0)) - 1.81959) < 1e-5);
  for (double r : {0.0, 2.0, 5.0}) {
    CHECK(std::abs(analytic::f_kernel(PointerParams(r, 0.7), Coupling(20.0))) < 1e-80);
  }
}

TEST_CASE("displaced kernels: normalisation and SPAC mean") {
  for (double r : {0.0, 0.5, 2.0, 4.0}) {
    const PointerParams p(r, 0.9);
    const auto k = analytic::displaced_kernels(p, 0.0);
    CHECK(std::abs(k.k0 - 1.0) < 1e-15);
    const Complex expected = p.alpha() * (2.0 + r * r) / (1.0 + r * r);
    CHECK(std::abs(k.k1 - expected) < 1e-13);
    CHECK(std::abs(analytic::initial_mean_a(p) - expected) < 1e-13);
  }
}

TEST_CASE("displaced kernels: alpha = 0 reduces to <1|D(mu)|1>") {
  for (double mu : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
    // <1|D(mu)|1> = e^{-mu^2/2} L_1(mu^2), from the explicit sum over Fock states.
    const Complex k0 = analytic::displaced_kernels(PointerParams(0.0, 0.0), mu).k0;
    const double expected = std::exp(-mu * mu / 2.0) * std::laguerre(1, mu * mu);
    CHECK(std::abs(k0 - expected) < 1e-15);
    CHECK(std::abs(k0 - std::exp(-mu * mu / 2.0) * (1.0 - mu * mu)) < 1e-15);
  }
}

TEST_CASE("displaced kernels: |K0| <= 1 and agreement with Fock inner products") {
  for (double r : {0.0, 1.0, 2.0, 3.0})
    for (double theta : {0.0, kPi / 6, kPi / 2, 2.5})
      for (Complex mu : {Complex(-0.8, 0), Complex(2.0, 0), Complex(0.3, 1.1), Complex(-1.5, -0.4)}) {
        const PointerParams p(r, theta);
        const auto k = analytic::displaced_kernels(p, mu);
        CHECK(std::abs(k.k0) <= 1.0 + 1e-15);
        CHECK(std::abs(k.k0 - fock_k0(p, mu)) < 1e-10);
        CHECK(std::abs(k.k1 - fock_k1(p, mu)) < 1e-10);
      }
}

TEST_CASE("transition value limits and oracle") {
  for (double phi : {kPi / 12, kPi / 3, 2.0})
    for (double delta : {0.0, kPi / 6, kPi / 2}) {
      const SelectionParams s(phi, delta);
      const PointerParams p(2.0, kPi / 6);
      CHECK(std::abs(analytic::transition_value(s, p, Coupling(1e-6)) - weak_value(s)) < 1e-5);
      CHECK(std::abs(analytic::transition_value(s, p, Coupling(20.0)) - abl_conditional(s)) < 1e-10);
    }
  const SelectionParams s(kPi / 6, kPi / 6);
  const PointerParams p(2.0, kPi / 6);
  const auto o = fock::evaluate(s, p, Coupling(1.0), kPolicy);
  CHECK(std::abs(analytic::transition_value(s, p, Coupling(1.0)) - o.transition_value) < 1e-10);
}

TEST_CASE("transition value is continuous in Gamma") {
  const SelectionParams s(kPi / 4, kPi / 5);
  const PointerParams p(1.5, 0.4);
  Complex prev = analytic::transition_value(s, p, Coupling(0.0));
  for (int i = 1; i <= 2000; ++i) {
    const Complex t = analytic::transition_value(s, p, Coupling(0.005 * i));
    CHECK(std::abs(t - prev) < 0.01);
    prev = t;
  }
}

TEST_CASE("pointer shifts: no interaction") {
  const auto r = analytic::pointer_shifts(SelectionParams(1.0, 2.0), PointerParams(2.0, 0.3), Coupling(0.0));
  CHECK(std::abs(r.dx) < 1e-14);
  CHECK(std::abs(r.dp) < 1e-14);
}

TEST_CASE("pointer shifts: single branch gives dx = g") {
  for (double r : {0.0, 1.0, 3.0})
    for (double G : {0.1, 1.4, 5.0})
      for (double sigma : {1.0, 0.4}) {
        const PointerParams p(r, 0.8, sigma);
        const auto res = analytic::pointer_shifts(SelectionParams(kPi / 2, 0.0), p, Coupling(G));
        CHECK(res.dx == doctest::Approx(G * sigma).epsilon(1e-12));
        CHECK(std::abs(res.dp) < 1e-12);
      }
}

TEST_CASE("pointer shifts: strong limit") {
  const SelectionParams s(kPi / 6, kPi / 6);
  const PointerParams p(2.0, kPi / 6);
  const Coupling c(20.0);
  const auto res = analytic::pointer_shifts(s, p, c);
  const double g = c.g(p);
  CHECK(std::abs(res.dx - g * abl_conditional(s)) < 1e-6 * g);
  CHECK(std::abs(res.dp) < 1e-6);
}

TEST_CASE("weak-limit shifts") {
  const PointerParams p(2.0, kPi / 6);
  CHECK(analytic::weak_limit_shifts(SelectionParams(1.0, 0.0), p, Coupling(0.1)).wp == 0.0);

  const SelectionParams s(1.0, 0.8);
  const auto w0 = analytic::weak_limit_shifts(s, PointerParams(0.0, 1.0, 0.7), Coupling(0.1));
  CHECK(w0.wx == doctest::Approx(0.1 * 0.7 * weak_value(s).real()).epsilon(1e-14));

  const SelectionParams f1(kPi / 6, kPi / 6);
  const Coupling c(0.01);
  const auto w = analytic::weak_limit_shifts(f1, p, c);
  const auto o = fock::evaluate(f1, p, c, kPolicy);
  // Second-order coefficients from a position-space integration of the same
  // state: (dx - W_x)/G^2 ~ 0.262 sigma, (dp - W_p)/G^2 ~ -0.676/sigma.
  CHECK(std::abs(o.dx - w.wx) <= 0.3 * 0.01 * 0.01 * p.sigma());
  CHECK(std::abs(o.dp - w.wp) <= 0.7 * 0.01 * 0.01 / p.sigma());
  CHECK(o.dx == doctest::Approx(0.0019754759441719116).epsilon(1e-7));
  CHECK(o.dp == doctest::Approx(0.0007630842415522476).epsilon(1e-6));
}

TEST_CASE("initial variances") {
  const auto v0 = analytic::initial_variances(PointerParams(0.0, 0.0));
  CHECK(v0.var_x == 3.0);
  CHECK(v0.var_p == 0.75);
  const auto v0s = analytic::initial_variances(PointerParams(0.0, 0.0, 0.5));
  CHECK(v0s.var_x == doctest::Approx(0.75));
  CHECK(v0s.var_p == doctest::Approx(3.0));

  CHECK(analytic::initial_variances(PointerParams(2.0, kPi / 6)).var_x == doctest::Approx(0.92).epsilon(1e-14));

  for (double r = 0.0; r <= 5.0; r += 0.25)
    for (double th = 0.0; th < 2 * kPi; th += 0.3) {
      const auto v = analytic::initial_variances(PointerParams(r, th, 1.3));
      CHECK(v.var_x * v.var_p >= 0.25 - 1e-12);
    }
}

TEST_CASE("theta derivative of Var(X) and the imaginary response coefficient") {
  for (double r : {0.5, 2.0})
    for (double th : {0.2, 1.0, 2.9}) {
      const double h = 1e-5;
      const double num = (analytic::initial_variances(PointerParams(r, th + h, 0.8)).var_x -
                          analytic::initial_variances(PointerParams(r, th - h, 0.8)).var_x) /
                         (2 * h);
      const PointerParams p(r, th, 0.8);
      CHECK(analytic::variance_x_theta_derivative(p) == doctest::Approx(num).epsilon(1e-8));

      const auto m = fock::moments(fock::spac_state(p, kPolicy), p);
      CHECK(std::abs(analytic::imaginary_response_coefficient(p) - (m.sym_xp - 2 * m.mean_x * m.mean_p)) < 1e-10);
    }
}

TEST_CASE("alpha = 0 matches a single-photon pointer") {
  const PointerParams p(0.0, 0.0);
  const int n = 96;
  Eigen::VectorXcd one = Eigen::VectorXcd::Zero(n);
  one[1] = 1.0;
  const fock::FockVector photon(one, 8);
  const SelectionParams s(1.1, 0.6);
  for (double G : {0.3, 1.0, 2.5}) {
    const Complex c_up = s.postselected_amplitude();
    const Complex c_dn = s.orthogonal_amplitude();
    const auto dp = fock::displacement_operator(G / 2, n).apply(photon, 8);
    const auto dm = fock::displacement_operator(-G / 2, n).apply(photon, 8);
    const Eigen::VectorXcd v = 0.5 * (c_up + c_dn) * dp.amplitudes() + 0.5 * (c_up - c_dn) * dm.amplitudes();
    const fock::FockVector state(v, 8);
    const auto m = fock::moments(state, p);
    const auto res = analytic::pointer_shifts(s, p, Coupling(G));
    CHECK(std::abs(res.dx - m.mean_x) < 1e-12);
    CHECK(std::abs(res.dp - m.mean_p) < 1e-12);
  }
}
