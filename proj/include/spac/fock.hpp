#ifndef SPAC_FOCK_HPP
#define SPAC_FOCK_HPP

// Truncated Fock-space oracle.
//
// Every quantity here is obtained by explicit linear algebra on photon-number
// amplitude vectors: SPAC amplitudes, displacement matrices, the two sigma_x
// branches of the measurement unitary, postselection onto |up_z>, and moments
// through the ladder action of a and a^dagger. Nothing from spac::analytic is
// used, so the two engines check each other.

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "spac/model.hpp"

namespace spac::fock {

class TruncationInsufficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TruncationPolicy {
  int initial_n_max = 64;
  int growth_factor = 2;
  double tail_tolerance = 1e-14;
  int guard_band = 8;
  int max_n_max = 4096;

  /// Throws InvalidParameter on n_max < 8, tolerance outside (0, 1e-6],
  /// growth factor < 2 or a negative guard band.
  void validate() const;
};

class FockVector {
 public:
  FockVector() = default;
  FockVector(Eigen::VectorXcd amplitudes, int guard_band);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  int n_max() const { return static_cast<int>(amplitudes_.size()); }
  Complex operator[](int n) const { return amplitudes_[n]; }

  /// Probability weight in the top guard band, relative to the norm; a proxy
  /// for the weight lost beyond the truncation.
  double tail_mass() const { return tail_mass_; }
  bool converged(double tolerance) const { return tail_mass_ < tolerance; }

  double norm_sq() const { return amplitudes_.squaredNorm(); }
  /// <this|other>; both vectors must share n_max.
  Complex inner(const FockVector& other) const;

  FockVector normalized() const;
  FockVector scaled(Complex factor) const;

  /// One "index,re,im" row per photon number, with a header.
  void write_csv(std::ostream& out) const;

 private:
  Eigen::VectorXcd amplitudes_;
  int guard_band_ = 0;
  double tail_mass_ = 0.0;
};

class FockOperator {
 public:
  FockOperator(Eigen::MatrixXcd matrix, std::string label)
      : matrix_(std::move(matrix)), label_(std::move(label)) {}

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }
  int n_max() const { return static_cast<int>(matrix_.rows()); }

  FockVector apply(const FockVector& v, int guard_band) const;

 private:
  Eigen::MatrixXcd matrix_;
  std::string label_;
};

/// max(initial n_max, ceil((r + Gamma/2 + 6)^2)).
int default_n_max(const PointerParams& pointer, const Coupling& coupling,
                  const TruncationPolicy& policy);

/// gamma a^dagger |alpha> truncated at a fixed n_max.
FockVector spac_state(const PointerParams& pointer, int n_max, const TruncationPolicy& policy);

/// gamma a^dagger |alpha>, growing n_max until the tail tolerance is met.
FockVector spac_state(const PointerParams& pointer, const TruncationPolicy& policy);

/// D(mu) = exp(mu a^dagger - mu^* a) restricted to photon numbers < n_max.
/// Each diagonal is filled from the three-term recurrence of the normalised
/// associated Laguerre functions, carried in log scale so that large |mu|
/// neither underflows nor overflows. The block holds the exact matrix
/// elements; only products of blocks see the truncation.
FockOperator displacement_operator(Complex mu, int n_max);

/// Number of leading basis states on which the truncated D(mu) is unitary to
/// about 1e-10.
int safe_dimension(Complex mu, int n_max, int guard_band);

/// Dense truncated ladder and quadrature matrices, for invariant checks.
FockOperator annihilation_operator(int n_max);
FockOperator creation_operator(int n_max);
FockOperator position_operator(int n_max, double sigma);
FockOperator momentum_operator(int n_max, double sigma);

/// Normalised postselected pointer state together with its bookkeeping.
struct FinalState {
  FockVector state;
  /// ||<psi_f| U |psi_i, phi>||^2, the exact (Gamma-dependent) success
  /// probability of the postselection.
  double success_probability = 0.0;
  /// 2 ||<psi_f| U |psi_i, phi>||^2 / |<psi_f|psi_i>|^2, the squared inverse
  /// normalisation of the final state, recovered from the vector norm.
  double beta_sq_inv = 0.0;
};

FinalState assemble_final_state(const SelectionParams& sel, const PointerParams& pointer,
                                const Coupling& coupling, int n_max,
                                const TruncationPolicy& policy);
FinalState assemble_final_state(const SelectionParams& sel, const PointerParams& pointer,
                                const Coupling& coupling, const TruncationPolicy& policy);

/// <psi_f| sigma_x U |psi_i, phi>, unnormalised.
FockVector sigma_branch_state(const SelectionParams& sel, const PointerParams& pointer,
                              const Coupling& coupling, int n_max,
                              const TruncationPolicy& policy);

struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
  /// <XP + PX>.
  double sym_xp = 0.0;

  double var_x() const { return mean_x2 - mean_x * mean_x; }
  double var_p() const { return mean_p2 - mean_p * mean_p; }
};

/// Quadrature moments of a state via the ladder action of a and a^dagger
/// (the state is renormalised first).
Moments moments(const FockVector& state, const PointerParams& pointer);

/// <[X, P]> with X and P both truncated; equals i when the state lives in the
/// safe subspace.
Complex commutator_expectation(const FockVector& state, const PointerParams& pointer);

struct NonpostselectedMoments {
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  int n_max = 0;
  double tail_mass = 0.0;

  double var_x() const { return mean_x2 - mean_x * mean_x; }
};

/// <Psi|X|Psi> and <Psi|X^2|Psi> for the joint state without postselection.
/// The sigma_x branches are orthogonal on the qubit, so the pointer sees a
/// probability mixture of the two displaced SPAC states.
NonpostselectedMoments nonpostselected_moments(const SelectionParams& sel,
                                               const PointerParams& pointer,
                                               const Coupling& coupling,
                                               const TruncationPolicy& policy);

/// Everything the oracle reports for one parameter point.
struct Evaluation {
  double beta_sq_inv = 0.0;
  double success_probability = 0.0;
  Complex transition_value;
  double dx = 0.0;
  double dp = 0.0;
  Moments initial;
  Moments final;
  int n_max = 0;
  double tail_mass = 0.0;
};

Evaluation evaluate(const SelectionParams& sel, const PointerParams& pointer,
                    const Coupling& coupling, int n_max, const TruncationPolicy& policy);

/// Evaluates at the adaptive n_max.
Evaluation evaluate(const SelectionParams& sel, const PointerParams& pointer,
                    const Coupling& coupling, const TruncationPolicy& policy);

struct Certificate {
  Evaluation value;
  int doubled_n_max = 0;
  /// Largest relative change of any reported quantity when n_max doubles.
  double max_relative_change = 0.0;
};

/// evaluate() at the adaptive n_max and at twice that, as a convergence
/// certificate.
Certificate certified_evaluate(const SelectionParams& sel, const PointerParams& pointer,
                               const Coupling& coupling, const TruncationPolicy& policy);

/// Smallest n_max >= the default meeting the tail tolerance for the
/// displaced SPAC branches at this point.
int adaptive_n_max(const PointerParams& pointer, const Coupling& coupling,
                   const TruncationPolicy& policy);

}  // namespace spac::fock

#endif  // SPAC_FOCK_HPP
