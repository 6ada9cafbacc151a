#include <doctest.h>

#include <cmath>

#include "spac/fock.hpp"
#include "spac/metrology.hpp"

using namespace spac;

namespace {

const fock::TruncationPolicy kPolicy{};

// |s> = D(s)|0> for real s. The generator is i(a^dagger - a), with variance 1
// in a coherent state, so F = 4.
fock::FockVector coherent(double s, int n) {
  Eigen::VectorXcd v(n);
  Complex c = std::exp(-s * s / 2.0);
  for (int k = 0; k < n; ++k) {
    v[k] = c;
    c *= s / std::sqrt(k + 1.0);
  }
  return fock::FockVector(v, 8);
}

}  // namespace

TEST_CASE("chi exceeds one at small phi in the weak regime") {
  const auto s = metrology::snr_ratio(SelectionParams(kPi / 12, 5 * kPi / 12), PointerParams(5.0, kPi / 2),
                                      Coupling(0.3), 100);
  CHECK(s.chi > 1.0);
  CHECK(s.R_p == doctest::Approx(std::sqrt(100 * s.P_s) * s.dx / s.Dx));
  CHECK(s.R_n == doctest::Approx(std::sqrt(100.0) * s.dx_prime / s.Dx_prime));
  CHECK(s.chi == doctest::Approx(s.R_p / s.R_n));
  CHECK(std::abs(s.dx - s.dx_analytic) < 1e-8 * std::max(1.0, std::abs(s.dx)));
}

TEST_CASE("chi does not depend on N") {
  const SelectionParams sel(kPi / 6, 5 * kPi / 12);
  const PointerParams p(5.0, kPi / 2);
  const double c1 = metrology::snr_ratio(sel, p, Coupling(0.3), 1).chi;
  for (long long N : {2LL, 100LL, 1000LL, 1000000LL}) {
    CHECK(std::abs(metrology::snr_ratio(sel, p, Coupling(0.3), N).chi - c1) <= 1e-12 * std::abs(c1));
  }
}

TEST_CASE("single-branch SNR") {
  for (double r : {0.0, 2.0})
    for (double G : {0.4, 1.5}) {
      const PointerParams p(r, kPi / 6);
      const auto s = metrology::snr_ratio(SelectionParams(kPi / 2, 0.0), p, Coupling(G), 7);
      CHECK(s.dx == doctest::Approx(G).epsilon(1e-12));
      CHECK(s.dx_prime == doctest::Approx(G).epsilon(1e-12));
      CHECK(s.P_s == doctest::Approx(0.5));
      // Both spreads are those of a displaced SPAC state.
      CHECK(s.Dx == doctest::Approx(s.Dx_prime).epsilon(1e-10));
      CHECK(s.chi == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    }
}

TEST_CASE("degenerate SNR reference") {
  const PointerParams p(2.0, 0.0);
  CHECK_THROWS_AS(metrology::snr_ratio(SelectionParams(1.0, kPi / 2), p, Coupling(1.0), 1),
                  metrology::DegenerateReference);
  CHECK_THROWS_AS(metrology::snr_ratio(SelectionParams(0.0, 0.0), p, Coupling(1.0), 1),
                  metrology::DegenerateReference);
  CHECK_THROWS_AS(metrology::snr_ratio(SelectionParams(1.0, 0.0), p, Coupling(0.0), 1),
                  metrology::DegenerateReference);
  CHECK_THROWS_AS(metrology::snr_ratio(SelectionParams(kPi, 0.0), p, Coupling(1.0), 1), OrthogonalSelection);
  CHECK_THROWS_AS(metrology::snr_ratio(SelectionParams(1.0, 0.0), p, Coupling(1.0), 0), InvalidParameter);
}

TEST_CASE("QFI single-branch benchmark") {
  for (double G : {0.2, 1.0, 2.0}) {
    const auto q = metrology::qfi(SelectionParams(kPi / 2, 0.0), PointerParams(0.0, 0.0), Coupling(G));
    CHECK(std::abs(q.F - 3.0) <= 1e-4);
    CHECK(std::abs(q.F_Q - 1.5) <= 1e-4);
    CHECK(std::abs(q.crb - 2.0 / 3.0) <= 1e-4);
    CHECK(std::abs(q.F_fidelity - 3.0) <= 1e-4);
  }
}

TEST_CASE("QFI of a coherent-state family") {
  const int n = 80;
  const auto f = metrology::family_qfi([&](double s) { return coherent(s, n); }, 1.3, 1e-4);
  CHECK(f.F == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(f.F_fidelity == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("QFI is invariant under a Gamma-dependent global phase") {
  const SelectionParams sel(kPi / 6, kPi / 6);
  const PointerParams p(2.0, kPi / 6);
  const int n = fock::adaptive_n_max(p, Coupling(1.1), kPolicy);
  auto plain = [&](double G) { return fock::assemble_final_state(sel, p, Coupling(G), n, kPolicy).state; };
  auto phased = [&](double G) {
    return plain(G).scaled(std::polar(1.0, std::sin(3.0 * G) + 5.0 * G * G));
  };
  const auto a = metrology::family_qfi(plain, 1.0, 1e-4);
  const auto b = metrology::family_qfi(phased, 1.0, 1e-4);
  CHECK(std::abs(a.F - b.F) <= 1e-6 * a.F);
  CHECK(std::abs(a.F_fidelity - b.F_fidelity) <= 1e-6 * a.F);
}

TEST_CASE("too coarse a step is refused") {
  const int n = 80;
  CHECK_THROWS_AS(metrology::family_qfi([&](double s) { return coherent(s, n); }, 1.3, 1.0),
                  metrology::StepTooCoarse);
}

TEST_CASE("QFI is larger around Gamma = 1 than in the weak regime") {
  const SelectionParams sel(kPi / 6, kPi / 6);
  const PointerParams p(2.0, kPi / 6);
  const auto weak = metrology::qfi(sel, p, Coupling(0.1));
  const auto mid = metrology::qfi(sel, p, Coupling(1.0));
  CHECK(mid.F_Q > weak.F_Q);
}

TEST_CASE("QFI nonnegativity and F_Q <= F") {
  for (double G : {0.01, 0.5, 1.5, 3.0})
    for (double phi : {0.05 * kPi, 0.5 * kPi, 0.95 * kPi})
      for (double delta : {0.0, 5 * kPi / 12})
        for (double r : {0.0, 2.0, 5.0}) {
          const auto q = metrology::qfi(SelectionParams(phi, delta), PointerParams(r, kPi / 6), Coupling(G));
          CHECK(q.F >= 0.0);
          CHECK(q.F_Q >= 0.0);
          CHECK(q.F_Q <= q.F);
          CHECK(q.crb > 0.0);
        }
}

TEST_CASE("QFI preconditions") {
  const SelectionParams sel(1.0, 0.0);
  const PointerParams p(1.0, 0.0);
  CHECK_THROWS_AS(metrology::qfi(sel, p, Coupling(5e-5), 1e-4), InvalidParameter);
  CHECK_THROWS_AS(metrology::qfi(sel, p, Coupling(1.0), -1e-4), InvalidParameter);
  CHECK_THROWS_AS(metrology::qfi(SelectionParams(kPi, 0.0), p, Coupling(1.0)), OrthogonalSelection);
}

TEST_CASE("Cramer-Rao bound") {
  double prev = INFINITY;
  for (long long N = 1; N <= 4096; N *= 2) {
    const double b = metrology::cramer_rao_bound(1.5, N);
    CHECK(b < prev);
    CHECK(b == doctest::Approx(1.0 / (1.5 * N)));
    prev = b;
  }
  CHECK_THROWS_AS(metrology::cramer_rao_bound(0.0, 1), InvalidParameter);
  CHECK_THROWS_AS(metrology::cramer_rao_bound(1.0, 0), InvalidParameter);
  const auto q = metrology::qfi(SelectionParams(kPi / 2, 0.0), PointerParams(0.0, 0.0), Coupling(1.0), 1e-4, 10);
  CHECK(q.crb == doctest::Approx(1.0 / (10 * q.F_Q)));
}
