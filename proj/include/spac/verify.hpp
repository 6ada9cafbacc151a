#ifndef SPAC_VERIFY_HPP
#define SPAC_VERIFY_HPP

// Self-check suites: cross-engine equivalence, limits, normalisation,
// truncation and unitarity hygiene, QFI estimator agreement, and the audit
// of the printed closed forms (reported, never fatal).

#include <iosfwd>
#include <string>
#include <vector>

#include "spac/audit.hpp"

namespace spac::verify {

enum class Level { fast, full };

Level parse_level(const std::string& name);

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  /// Authoritative checks decide the exit status; audit findings do not.
  bool authoritative = true;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<audit::AuditRecord> audit;

  bool ok() const;
  int failures() const;
};

VerifyReport run(Level level);

/// One line per check, then the audit table.
void print(std::ostream& out, const VerifyReport& report);

}  // namespace spac::verify

#endif  // SPAC_VERIFY_HPP
