#ifndef SPAC_MODEL_HPP
#define SPAC_MODEL_HPP

// Parameter types for a qubit measured by a single-photon-added coherent
// (SPAC) pointer, plus the qubit-side closed forms that everything else
// builds on.
//
// Conventions: hbar = 1, X = sigma (a + a^dagger), P = i/(2 sigma) (a^dagger - a),
// preselection cos(phi/2)|up_z> + e^{i delta} sin(phi/2)|down_z>,
// postselection |up_z>.

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spac {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Postselection is rejected when cos^2(phi/2) falls below this.
inline constexpr double kOrthogonalityGuard = 1e-12;

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The pre- and postselected qubit states are (numerically) orthogonal, so
/// the weak value and everything normalised by the postselection diverges.
class OrthogonalSelection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Throws InvalidParameter unless both components are finite.
Complex checked(Complex z, const char* what);

class SelectionParams {
 public:
  /// phi must lie in [0, pi]; delta is wrapped into [0, 2 pi).
  SelectionParams(double phi, double delta);

  double phi() const { return phi_; }
  double delta() const { return delta_; }

  /// <up_z|psi_i> = cos(phi/2).
  double postselected_amplitude() const;
  /// <down_z|psi_i> = e^{i delta} sin(phi/2).
  Complex orthogonal_amplitude() const;

  bool postselectable() const;

 private:
  double phi_;
  double delta_;
};

class PointerParams {
 public:
  PointerParams(double r, double theta, double sigma = 1.0);

  double r() const { return r_; }
  double theta() const { return theta_; }
  double sigma() const { return sigma_; }

  /// Coherent amplitude r e^{i theta}.
  Complex alpha() const { return std::polar(r_, theta_); }
  /// 1 / sqrt(1 + r^2).
  double gamma() const;
  /// gamma^{-2} = 1 + r^2.
  double gamma_inv_sq() const { return 1.0 + r_ * r_; }

 private:
  double r_;
  double theta_;
  double sigma_;
};

/// Measurement strength Gamma = g / sigma.
class Coupling {
 public:
  explicit Coupling(double gamma_strength);

  double strength() const { return strength_; }
  /// Coupling constant in position units.
  double g(const PointerParams& pointer) const { return strength_ * pointer.sigma(); }

 private:
  double strength_;
};

/// Flat record of one parameter point, as read from configs and CSV rows.
struct ParameterRecord {
  double phi = kPi / 6.0;
  double delta = kPi / 6.0;
  double r = 2.0;
  double theta = kPi / 6.0;
  double sigma = 1.0;
  double Gamma = 1.0;
  long long N = 1;

  SelectionParams selection() const { return {phi, delta}; }
  PointerParams pointer() const { return {r, theta, sigma}; }
  Coupling coupling() const { return Coupling(Gamma); }
  /// Constructs all three parameter types, throwing InvalidParameter on the
  /// first invalid field (or on N < 1).
  void validate() const;
};

/// e^{i delta} tan(phi/2). Throws OrthogonalSelection near phi = pi.
Complex weak_value(const SelectionParams& sel);

/// |<psi_f|psi_i>|^2 = cos^2(phi/2).
double postselection_probability(const SelectionParams& sel);

/// Aharonov-Bergmann-Lebowitz conditional expectation of sigma_x,
/// cos(delta) sin(phi).
double abl_conditional(const SelectionParams& sel);

/// Parses an angle such as "0.3", "pi", "-pi/4", "5pi/12", "2*pi/3" or
/// "0.25pi" into radians.
double parse_angle(const std::string& text);

}  // namespace spac

#endif  // SPAC_MODEL_HPP
