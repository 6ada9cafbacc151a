#ifndef SPAC_SWEEP_HPP
#define SPAC_SWEEP_HPP

// One-dimensional parameter sweeps over phi, Gamma or r, evaluated by both
// engines, plus the figure presets and CSV/SVG writers.

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spac/fock.hpp"
#include "spac/model.hpp"

namespace spac::sweep {

enum class Axis { phi, Gamma, r };
enum class Output { dx, dp, transition, chi, qfi, crb };

Axis parse_axis(const std::string& name);
Output parse_output(const std::string& name);
std::string to_string(Axis axis);
std::string to_string(Output output);

struct Range {
  double start = 0.0;
  double stop = 1.0;
  int count = 2;

  /// count points, both ends included.
  std::vector<double> points() const;
};

struct SweepSpec {
  Axis axis = Axis::phi;
  Range range;
  ParameterRecord fixed;
  std::set<Output> outputs;
  std::string series;

  /// Throws InvalidParameter on count < 2, an empty output set, non-finite
  /// ends, or an end point outside the axis domain.
  void validate() const;
  /// The fixed record with the swept parameter set to `value`.
  ParameterRecord at(double value) const;
};

struct Row {
  std::string series;
  std::vector<double> values;  // NaN where the point failed
  std::string status;          // "ok" or "<error>: <message>"
};

struct Table {
  std::vector<std::string> columns;  // "name[unit]"
  std::vector<Row> rows;

  /// Index of a column by its exact header, or of the first column whose
  /// name (before '[') matches.
  std::optional<std::size_t> column(const std::string& name) const;
};

/// Worker count from SPAC_THREADS, else hardware concurrency (at least 1).
int thread_count();

/// Column headers for a set of outputs, shared by every spec with that set.
std::vector<std::string> columns_for(const std::set<Output>& outputs);

/// One row per grid point in index order, whatever the thread count.
/// Per-point failures become flagged rows with NaN values.
Table run_sweep(const SweepSpec& spec, const fock::TruncationPolicy& policy = {},
                int threads = 0);

/// Runs each spec (all must share one output set) and concatenates rows.
Table run_sweeps(const std::vector<SweepSpec>& specs, const fock::TruncationPolicy& policy = {},
                 int threads = 0);

std::vector<std::string> preset_names();
/// Specs for fig1, fig3a, fig3b, fig4 or fig5 with `count` points per axis.
std::vector<SweepSpec> preset(const std::string& name, int count = 201);

/// Header row then one row per grid point, numbers in %.17g.
void write_csv(std::ostream& out, const Table& table);

/// Line plot of column y against column x, one polyline per series.
void write_svg(std::ostream& out, const Table& table, const std::string& x,
               const std::string& y, const std::string& title);

/// Default (x, y) columns to plot for a preset.
std::pair<std::string, std::string> preset_plot_columns(const std::string& name);

}  // namespace spac::sweep

#endif  // SPAC_SWEEP_HPP
