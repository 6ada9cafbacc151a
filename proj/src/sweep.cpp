#include "spac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "spac/analytic.hpp"
#include "spac/audit.hpp"
#include "spac/metrology.hpp"

namespace spac::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, Axis>& axis_names() {
  static const std::map<std::string, Axis> names{
      {"phi", Axis::phi}, {"Gamma", Axis::Gamma}, {"r", Axis::r}};
  return names;
}

const std::map<std::string, Output>& output_names() {
  static const std::map<std::string, Output> names{
      {"dx", Output::dx},   {"dp", Output::dp},   {"transition", Output::transition},
      {"chi", Output::chi}, {"qfi", Output::qfi}, {"crb", Output::crb}};
  return names;
}

const std::vector<std::string> kParameterColumns{
    "index[1]", "phi[rad]", "delta[rad]", "r[1]", "theta[rad]",
    "sigma[pos]", "Gamma[1]", "g[pos]", "N[1]"};

std::vector<std::string> output_columns(Output o) {
  switch (o) {
    case Output::dx:
      return {"dx_analytic[pos]", "dx_oracle[pos]", "dx_over_g[1]", "dx_residual[pos]"};
    case Output::dp:
      return {"dp_analytic[1/pos]", "dp_oracle[1/pos]", "dp_residual[1/pos]"};
    case Output::transition:
      return {"transition_analytic.re[1]", "transition_analytic.im[1]",
              "transition_oracle.re[1]",   "transition_oracle.im[1]",
              "transition_residual[1]"};
    case Output::chi:
      // chi_printed_dx substitutes the printed closed-form dx for the oracle
      // one; kept for comparison with the published curves only.
      return {"chi[1]",    "chi_printed_dx[1]", "R_p[1]",       "R_n[1]",    "P_s[1]",
              "P_exact[1]", "dx_prime[pos]",    "Dx[pos]",      "Dx_prime[pos]"};
    case Output::qfi:
      return {"F[1]", "F_Q[1]", "F_fidelity[1]", "qfi_step[1]"};
    case Output::crb:
      return {"crb[1]"};
  }
  return {};
}

std::string error_status(const std::exception& e) {
  std::string kind = "error";
  if (dynamic_cast<const OrthogonalSelection*>(&e)) kind = "orthogonal_selection";
  else if (dynamic_cast<const metrology::DegenerateReference*>(&e)) kind = "degenerate_reference";
  else if (dynamic_cast<const metrology::StepTooCoarse*>(&e)) kind = "step_too_coarse";
  else if (dynamic_cast<const fock::TruncationInsufficient*>(&e)) kind = "truncation_insufficient";
  else if (dynamic_cast<const InvalidParameter*>(&e)) kind = "invalid_parameter";
  std::string msg = e.what();
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return kind + ": " + msg;
}

struct PointResult {
  std::vector<double> values;
  std::string status = "ok";
};

// Fills the output section of one row; parameter columns and truncation
// bookkeeping are handled by the caller.
PointResult evaluate_point(const std::set<Output>& outputs, const ParameterRecord& p,
                           const fock::TruncationPolicy& policy, int& n_max, double& tail) {
  p.validate();
  const auto sel = p.selection();
  const auto ptr = p.pointer();
  const auto cpl = p.coupling();
  const double g = cpl.g(ptr);

  PointResult out;
  auto note = [&](int n, double t) {
    n_max = std::max(n_max, n);
    tail = std::max(tail, t);
  };

  const bool need_shifts = outputs.count(Output::dx) || outputs.count(Output::dp) ||
                           outputs.count(Output::transition);
  analytic::ShiftResult exact;
  fock::Evaluation oracle;
  if (need_shifts) {
    exact = analytic::pointer_shifts(sel, ptr, cpl);
    oracle = fock::evaluate(sel, ptr, cpl, policy);
    note(oracle.n_max, oracle.tail_mass);
  }

  std::optional<metrology::FisherReport> fisher;
  if (outputs.count(Output::qfi) || outputs.count(Output::crb)) {
    fisher = metrology::qfi(sel, ptr, cpl, metrology::kDefaultQfiStep, p.N, policy);
    note(fisher->n_max, fisher->tail_mass);
  }

  auto& v = out.values;
  for (Output o : outputs) {
    switch (o) {
      case Output::dx:
        v.insert(v.end(), {exact.dx, oracle.dx, g > 0.0 ? oracle.dx / g : kNaN,
                           exact.dx - oracle.dx});
        break;
      case Output::dp:
        v.insert(v.end(), {exact.dp, oracle.dp, exact.dp - oracle.dp});
        break;
      case Output::transition:
        v.insert(v.end(), {exact.transition_value.real(), exact.transition_value.imag(),
                           oracle.transition_value.real(), oracle.transition_value.imag(),
                           std::abs(exact.transition_value - oracle.transition_value)});
        break;
      case Output::chi: {
        const auto s = metrology::snr_ratio(sel, ptr, cpl, p.N, policy);
        note(s.n_max, s.tail_mass);
        const double printed_dx = audit::printed_values(sel, ptr, cpl).dx;
        v.insert(v.end(), {s.chi, s.chi * printed_dx / s.dx, s.R_p, s.R_n, s.P_s,
                           s.exact_success_probability, s.dx_prime, s.Dx, s.Dx_prime});
        break;
      }
      case Output::qfi:
        v.insert(v.end(), {fisher->F, fisher->F_Q, fisher->F_fidelity, fisher->step});
        break;
      case Output::crb:
        v.push_back(fisher->F_Q > 0.0 ? metrology::cramer_rao_bound(fisher->F_Q, p.N)
                                      : std::numeric_limits<double>::infinity());
        break;
    }
  }
  return out;
}

bool within_domain(Axis axis, double value) {
  switch (axis) {
    case Axis::phi:
      return value >= 0.0 && value <= kPi;
    case Axis::Gamma:
    case Axis::r:
      return value >= 0.0;
  }
  return false;
}

}  // namespace

Axis parse_axis(const std::string& name) {
  const auto it = axis_names().find(name);
  if (it == axis_names().end()) throw InvalidParameter("unknown sweep axis '" + name + "'");
  return it->second;
}

Output parse_output(const std::string& name) {
  const auto it = output_names().find(name);
  if (it == output_names().end()) throw InvalidParameter("unknown output '" + name + "'");
  return it->second;
}

std::string to_string(Axis axis) {
  for (const auto& [k, v] : axis_names()) {
    if (v == axis) return k;
  }
  return "?";
}

std::string to_string(Output output) {
  for (const auto& [k, v] : output_names()) {
    if (v == output) return k;
  }
  return "?";
}

std::vector<double> Range::points() const {
  std::vector<double> pts(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    // Ends are set exactly so that presets hit phi = pi etc. bit for bit.
    pts[i] = (i == count - 1) ? stop : start + (stop - start) * i / (count - 1);
  }
  return pts;
}

void SweepSpec::validate() const {
  if (range.count < 2) throw InvalidParameter("sweep needs at least two points");
  if (!std::isfinite(range.start) || !std::isfinite(range.stop)) {
    throw InvalidParameter("sweep range must be finite");
  }
  if (!within_domain(axis, range.start) || !within_domain(axis, range.stop)) {
    throw InvalidParameter("sweep range leaves the domain of " + to_string(axis));
  }
  if (outputs.empty()) throw InvalidParameter("sweep requests no outputs");
  at(range.start).validate();
  at(range.stop).validate();
}

ParameterRecord SweepSpec::at(double value) const {
  ParameterRecord p = fixed;
  switch (axis) {
    case Axis::phi: p.phi = value; break;
    case Axis::Gamma: p.Gamma = value; break;
    case Axis::r: p.r = value; break;
  }
  return p;
}

std::optional<std::size_t> Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].substr(0, columns[i].find('[')) == name) return i;
  }
  return std::nullopt;
}

int thread_count() {
  if (const char* env = std::getenv("SPAC_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 256L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<std::string> columns_for(const std::set<Output>& outputs) {
  std::vector<std::string> cols = kParameterColumns;
  for (Output o : outputs) {
    const auto extra = output_columns(o);
    cols.insert(cols.end(), extra.begin(), extra.end());
  }
  cols.push_back("n_max[1]");
  cols.push_back("tail_mass[1]");
  return cols;
}

Table run_sweep(const SweepSpec& spec, const fock::TruncationPolicy& policy, int threads) {
  spec.validate();
  policy.validate();

  Table table;
  table.columns = columns_for(spec.outputs);
  const auto grid = spec.range.points();
  const std::size_t width = table.columns.size();
  std::size_t n_outputs = 0;
  for (Output o : spec.outputs) n_outputs += output_columns(o).size();

  table.rows.resize(grid.size());
  auto work = [&](std::size_t i) {
    const ParameterRecord p = spec.at(grid[i]);
    Row& row = table.rows[i];
    row.series = spec.series;
    row.values.assign(width, kNaN);
    row.values[0] = static_cast<double>(i);
    row.values[1] = p.phi;
    row.values[2] = p.delta;
    row.values[3] = p.r;
    row.values[4] = p.theta;
    row.values[5] = p.sigma;
    row.values[6] = p.Gamma;
    row.values[7] = p.Gamma * p.sigma;
    row.values[8] = static_cast<double>(p.N);

    int n_max = 0;
    double tail = 0.0;
    try {
      auto result = evaluate_point(spec.outputs, p, policy, n_max, tail);
      std::copy(result.values.begin(), result.values.end(),
                row.values.begin() + static_cast<long>(kParameterColumns.size()));
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = error_status(e);
    }
    const std::size_t base = kParameterColumns.size() + n_outputs;
    row.values[base] = n_max > 0 ? n_max : kNaN;
    row.values[base + 1] = n_max > 0 ? tail : kNaN;
  };

  const int workers = std::clamp(threads > 0 ? threads : thread_count(), 1,
                                 static_cast<int>(grid.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) work(i);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < grid.size(); i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();
  return table;
}

Table run_sweeps(const std::vector<SweepSpec>& specs, const fock::TruncationPolicy& policy,
                 int threads) {
  if (specs.empty()) throw InvalidParameter("no sweeps to run");
  Table all;
  all.columns = columns_for(specs.front().outputs);
  for (const auto& spec : specs) {
    if (spec.outputs != specs.front().outputs) {
      throw InvalidParameter("sweeps in one table must request the same outputs");
    }
    auto t = run_sweep(spec, policy, threads);
    for (auto& row : t.rows) all.rows.push_back(std::move(row));
  }
  return all;
}

std::vector<std::string> preset_names() { return {"fig1", "fig3a", "fig3b", "fig4", "fig5"}; }

std::vector<SweepSpec> preset(const std::string& name, int count) {
  struct Variant {
    std::string label;
    double value;
  };
  const std::vector<Variant> phis{{"phi=pi/12", kPi / 12.0},
                                  {"phi=pi/6", kPi / 6.0},
                                  {"phi=pi/3", kPi / 3.0},
                                  {"phi=pi/2", kPi / 2.0}};

  std::vector<SweepSpec> specs;
  if (name == "fig1") {
    for (double G : {0.01, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      SweepSpec s;
      s.axis = Axis::phi;
      s.range = {0.0, kPi, count};
      s.fixed = ParameterRecord{};  // r = 2, theta = delta = pi/6
      s.fixed.Gamma = G;
      s.outputs = {Output::dx, Output::dp, Output::transition};
      s.series = fmt::format("Gamma={}", G);
      specs.push_back(s);
    }
  } else if (name == "fig3a" || name == "fig3b") {
    const bool by_gamma = name == "fig3a";
    for (const auto& v : phis) {
      SweepSpec s;
      s.fixed.phi = v.value;
      s.fixed.delta = 5.0 * kPi / 12.0;
      s.fixed.theta = kPi / 2.0;
      s.fixed.r = 5.0;
      s.fixed.Gamma = 0.3;
      if (by_gamma) {
        s.axis = Axis::Gamma;
        s.range = {0.05, 1.0, count};
      } else {
        s.axis = Axis::r;
        s.range = {0.0, 10.0, count};
      }
      s.outputs = {Output::chi};
      s.series = v.label;
      specs.push_back(s);
    }
  } else if (name == "fig4") {
    auto variants = phis;
    variants.insert(variants.begin() + 2, {"phi=pi/4", kPi / 4.0});
    for (const auto& v : variants) {
      SweepSpec s;
      s.axis = Axis::Gamma;
      s.range = {0.01, 3.0, count};
      s.fixed.phi = v.value;
      s.outputs = {Output::qfi, Output::crb};
      s.series = v.label;
      specs.push_back(s);
    }
  } else if (name == "fig5") {
    for (double G : {0.1, 0.5, 1.0, 2.0}) {
      SweepSpec s;
      s.axis = Axis::r;
      s.range = {0.0, 5.0, count};
      s.fixed.Gamma = G;
      s.outputs = {Output::qfi, Output::crb};
      s.series = fmt::format("Gamma={}", G);
      specs.push_back(s);
    }
  } else {
    throw InvalidParameter("unknown preset '" + name + "'");
  }
  return specs;
}

std::pair<std::string, std::string> preset_plot_columns(const std::string& name) {
  if (name == "fig1") return {"phi", "dx_over_g"};
  if (name == "fig3a") return {"Gamma", "chi"};
  if (name == "fig3b") return {"r", "chi"};
  if (name == "fig4") return {"Gamma", "F_Q"};
  if (name == "fig5") return {"r", "F_Q"};
  throw InvalidParameter("unknown preset '" + name + "'");
}

void write_csv(std::ostream& out, const Table& table) {
  out << "series";
  for (const auto& c : table.columns) out << ',' << c;
  out << ",status\n";
  for (const auto& row : table.rows) {
    out << row.series;
    for (double v : row.values) out << ',' << fmt::format("{:.17g}", v);
    out << ',' << row.status << '\n';
  }
}

void write_svg(std::ostream& out, const Table& table, const std::string& x,
               const std::string& y, const std::string& title) {
  const auto xi = table.column(x);
  const auto yi = table.column(y);
  if (!xi || !yi) throw InvalidParameter("plot columns not in table: " + x + ", " + y);

  // Series in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::vector<std::pair<double, double>>>> lines;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& row : table.rows) {
    if (!lines.count(row.series)) {
      order.push_back(row.series);
      lines[row.series].emplace_back();
    }
    auto& segs = lines[row.series];
    const double px = row.values[*xi];
    const double py = row.values[*yi];
    if (!std::isfinite(px) || !std::isfinite(py)) {
      if (!segs.back().empty()) segs.emplace_back();
      continue;
    }
    segs.back().emplace_back(px, py);
    x0 = std::min(x0, px);
    x1 = std::max(x1, px);
    y0 = std::min(y0, py);
    y1 = std::max(y1, py);
  }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }

  const double W = 720, H = 480, L = 70, R = 160, T = 40, B = 50;
  auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      W, H);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  out << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\">{}</text>\n", (L + W - R) / 2,
                     title);
  out << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
      W - L - R, H - T - B);
  for (int k = 0; k <= 4; ++k) {
    const double vx = x0 + (x1 - x0) * k / 4.0;
    const double vy = y0 + (y1 - y0) * k / 4.0;
    out << fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n", sx(vx),
                       H - B + 16, vx);
    out << fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", L - 6,
                       sy(vy) + 4, vy);
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (L + W - R) / 2,
                     H - 12, table.columns[*xi]);
  out << fmt::format(
      "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
      (T + H - B) / 2, (T + H - B) / 2, table.columns[*yi]);

  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* colour = palette[s % std::size(palette)];
    for (const auto& seg : lines[order[s]]) {
      if (seg.size() < 2) continue;
      out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [px, py] : seg) out << fmt::format("{:.2f},{:.2f} ", sx(px), sy(py));
      out << "\"/>\n";
    }
    const double ly = T + 16 + 18 * static_cast<double>(s);
    out << fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        W - R + 12, ly, W - R + 36, ly, colour);
    out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", W - R + 42, ly + 4, order[s]);
  }
  out << "</svg>\n";
}

}  // namespace spac::sweep
