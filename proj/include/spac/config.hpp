#ifndef SPAC_CONFIG_HPP
#define SPAC_CONFIG_HPP

// Plain-text run configuration:
//
//   # comment
//   [point]
//   phi = 5pi/12        angles accept fractions of pi
//   r = 5
//   [sweep]
//   axis = Gamma
//   start = 0.05
//   stop = 1
//   count = 201
//   outputs = chi, qfi
//   [truncation]
//   tail_tolerance = 1e-14
//
// Command-line overrides use "section.key=value" (section defaults to point).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spac/fock.hpp"
#include "spac/model.hpp"
#include "spac/sweep.hpp"

namespace spac::config {

/// Malformed or out-of-domain configuration; the CLI maps it to exit code 2.
class ConfigError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

struct Config {
  ParameterRecord point;
  fock::TruncationPolicy policy;
  /// Present when a [sweep] section (or sweep.* override) was given.
  std::optional<sweep::SweepSpec> sweep;

  /// Validates every part; throws ConfigError.
  void validate() const;
};

Config parse(std::istream& in, const std::string& source = "<input>");
Config load(const std::string& path);

/// Applies one "section.key=value" assignment.
void apply_override(Config& config, const std::string& assignment);
void apply_overrides(Config& config, const std::vector<std::string>& assignments);

}  // namespace spac::config

#endif  // SPAC_CONFIG_HPP
