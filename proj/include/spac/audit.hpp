#ifndef SPAC_AUDIT_HPP
#define SPAC_AUDIT_HPP

// Literal transcription of the published closed forms for beta^{-2}, dx and
// dp, kept only to be compared against the first-principles engine and the
// Fock oracle. Nothing else in the library uses these.

#include <iosfwd>
#include <string>
#include <vector>

#include "spac/fock.hpp"
#include "spac/model.hpp"

namespace spac::audit {

struct PrintedValues {
  double beta_sq_inv = 0.0;
  double dx = 0.0;
  double dp = 0.0;
};

/// The printed formulas, term for term (including the printed normalisation,
/// whose imaginary cross term carries 2i Im(alpha) without a factor Gamma).
PrintedValues printed_values(const SelectionParams& sel, const PointerParams& pointer,
                             const Coupling& coupling);

struct AuditRecord {
  ParameterRecord point;
  std::string quantity;
  double paper_verbatim = 0.0;
  double first_principles = 0.0;
  double oracle = 0.0;
  /// |paper_verbatim - oracle|, recorded however large.
  double discrepancy = 0.0;
};

/// Fig. 1 angles and pointer over a Gamma ladder from 0 to 20, plus an
/// imaginary-alpha pointer where the printed dx has no Gamma = 0 offset.
std::vector<ParameterRecord> default_audit_points();

/// Rows for beta_inv_sq, dx and dp at every point.
std::vector<AuditRecord> audit_table(const std::vector<ParameterRecord>& points,
                                     const fock::TruncationPolicy& policy = {});

void write_audit_csv(std::ostream& out, const std::vector<AuditRecord>& records);

}  // namespace spac::audit

#endif  // SPAC_AUDIT_HPP
