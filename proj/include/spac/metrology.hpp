#ifndef SPAC_METROLOGY_HPP
#define SPAC_METROLOGY_HPP

// Precision-measurement figures of merit for the postselected SPAC pointer:
// signal-to-noise ratios with and without postselection, quantum Fisher
// information for Gamma, and the Cramer-Rao bound.
//
// P_s is the bare overlap cos^2(phi/2) throughout; the exact Gamma-dependent
// success probability is reported alongside as a diagnostic only.

#include <functional>
#include <stdexcept>

#include "spac/fock.hpp"
#include "spac/model.hpp"

namespace spac::metrology {

/// The nonpostselected shift g sin(phi) cos(delta) vanishes, so R_n = 0.
class DegenerateReference : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The derivative and fidelity QFI estimators disagree even after one
/// step refinement.
class StepTooCoarse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SnrReport {
  double R_p = 0.0;
  double R_n = 0.0;
  double chi = 0.0;
  long long N_trials = 1;
  double P_s = 0.0;

  double dx = 0.0;            // postselected shift, oracle
  double dx_analytic = 0.0;   // same, closed form
  double Dx = 0.0;            // postselected position spread
  double dx_prime = 0.0;      // nonpostselected shift
  double Dx_prime = 0.0;      // nonpostselected position spread
  double exact_success_probability = 0.0;
  int n_max = 0;
  double tail_mass = 0.0;
};

struct FisherReport {
  double F = 0.0;           // QFI per postselected event
  double F_Q = 0.0;         // P_s F
  double crb = 0.0;         // 1 / (N F_Q)
  double step = 0.0;        // finite-difference step actually used
  double F_fidelity = 0.0;  // fidelity-form estimate
  long long N_trials = 1;
  int n_max = 0;
  double tail_mass = 0.0;
};

/// Ratio chi = R_p / R_n of postselected to nonpostselected SNR.
SnrReport snr_ratio(const SelectionParams& sel, const PointerParams& pointer,
                    const Coupling& coupling, long long N,
                    const fock::TruncationPolicy& policy = {});

inline constexpr double kDefaultQfiStep = 1e-4;
inline constexpr double kQfiAgreement = 1e-4;

/// A normalised pure-state family Gamma -> |Phi_Gamma>, all on one truncation.
using StateFamily = std::function<fock::FockVector(double)>;

struct FamilyFisher {
  double F = 0.0;
  double F_fidelity = 0.0;
  double step = 0.0;
};

/// QFI of a state family at `at`: derivative form from phase-aligned central
/// differences with one Richardson refinement, cross-checked by the fidelity
/// form. Refines the step once on disagreement, then throws StepTooCoarse.
FamilyFisher family_qfi(const StateFamily& family, double at, double step);

/// QFI of the postselected pointer with respect to Gamma.
FisherReport qfi(const SelectionParams& sel, const PointerParams& pointer,
                 const Coupling& coupling, double step = kDefaultQfiStep, long long N = 1,
                 const fock::TruncationPolicy& policy = {});

/// 1 / (N F_Q), as printed for the bound on Delta Gamma.
double cramer_rao_bound(double F_Q, long long N);

}  // namespace spac::metrology

#endif  // SPAC_METROLOGY_HPP
