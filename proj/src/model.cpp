#include "spac/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

namespace spac {

Complex checked(Complex z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidParameter(std::string("non-finite value for ") + what);
  }
  return z;
}

SelectionParams::SelectionParams(double phi, double delta) : phi_(phi), delta_(delta) {
  if (!std::isfinite(phi) || !std::isfinite(delta)) {
    throw InvalidParameter("selection angles must be finite");
  }
  if (phi < 0.0 || phi > kPi) {
    throw InvalidParameter("phi must lie in [0, pi]");
  }
  delta_ = std::fmod(delta, 2.0 * kPi);
  if (delta_ < 0.0) delta_ += 2.0 * kPi;
  if (delta_ >= 2.0 * kPi) delta_ = 0.0;
}

double SelectionParams::postselected_amplitude() const { return std::cos(phi_ / 2.0); }

Complex SelectionParams::orthogonal_amplitude() const {
  return std::polar(std::sin(phi_ / 2.0), delta_);
}

bool SelectionParams::postselectable() const {
  const double c = postselected_amplitude();
  return c * c >= kOrthogonalityGuard;
}

PointerParams::PointerParams(double r, double theta, double sigma)
    : r_(r), theta_(theta), sigma_(sigma) {
  if (!std::isfinite(r) || !std::isfinite(theta) || !std::isfinite(sigma)) {
    throw InvalidParameter("pointer parameters must be finite");
  }
  if (r < 0.0) throw InvalidParameter("coherent amplitude r must be nonnegative");
  if (sigma <= 0.0) throw InvalidParameter("beam width sigma must be positive");
}

double PointerParams::gamma() const { return 1.0 / std::sqrt(gamma_inv_sq()); }

Coupling::Coupling(double gamma_strength) : strength_(gamma_strength) {
  if (!std::isfinite(gamma_strength) || gamma_strength < 0.0) {
    throw InvalidParameter("measurement strength Gamma must be finite and nonnegative");
  }
}

void ParameterRecord::validate() const {
  (void)selection();
  (void)pointer();
  (void)coupling();
  if (N < 1) throw InvalidParameter("number of trials N must be positive");
}

Complex weak_value(const SelectionParams& sel) {
  if (!sel.postselectable()) {
    throw OrthogonalSelection("pre- and postselected states are orthogonal; weak value undefined");
  }
  return std::polar(std::tan(sel.phi() / 2.0), sel.delta());
}

double postselection_probability(const SelectionParams& sel) {
  const double c = sel.postselected_amplitude();
  return c * c;
}

double abl_conditional(const SelectionParams& sel) {
  return std::cos(sel.delta()) * std::sin(sel.phi());
}

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& original) {
  if (s.empty()) throw InvalidParameter("malformed angle: '" + original + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw InvalidParameter("malformed angle: '" + original + "'");
  }
  return v;
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string s = strip(text);
  if (s.empty()) throw InvalidParameter("empty angle");

  double divisor = 1.0;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    divisor = parse_number(s.substr(slash + 1), text);
    if (divisor == 0.0) throw InvalidParameter("division by zero in angle '" + text + "'");
    s = s.substr(0, slash);
  }

  const auto pi_pos = s.find("pi");
  double value = 0.0;
  if (pi_pos == std::string::npos) {
    value = parse_number(s, text);
  } else {
    if (pi_pos + 2 != s.size()) throw InvalidParameter("malformed angle: '" + text + "'");
    std::string coeff = s.substr(0, pi_pos);
    if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
    double c = 1.0;
    if (coeff == "-") {
      c = -1.0;
    } else if (coeff == "+") {
      c = 1.0;
    } else if (!coeff.empty()) {
      c = parse_number(coeff, text);
    }
    value = c * kPi;
  }
  return value / divisor;
}

}  // namespace spac
