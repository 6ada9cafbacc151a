#include "spac/config.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace spac::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, const std::string& key) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

long long parse_integer(const std::string& v, const std::string& key) {
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& v, const std::string& key) {
  const long long x = parse_integer(v, key);
  if (x < INT_MIN || x > INT_MAX) throw ConfigError("'" + key + "' out of range");
  return static_cast<int>(x);
}

double parse_angle_value(const std::string& v, const std::string& key) {
  try {
    return parse_angle(v);
  } catch (const InvalidParameter& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

// Sweep endpoints are stored as text until the axis is known, because phi
// endpoints accept pi fractions and the others do not.
struct PendingSweep {
  std::optional<std::string> axis, start, stop, count, outputs, series;
};

struct Builder {
  Config config;
  PendingSweep sweep;
  bool has_sweep = false;

  void set(const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    if (section == "point") {
      auto& p = config.point;
      if (key == "phi") p.phi = parse_angle_value(value, full);
      else if (key == "delta") p.delta = parse_angle_value(value, full);
      else if (key == "theta") p.theta = parse_angle_value(value, full);
      else if (key == "r") p.r = parse_real(value, full);
      else if (key == "sigma") p.sigma = parse_real(value, full);
      else if (key == "Gamma" || key == "gamma") p.Gamma = parse_real(value, full);
      else if (key == "N") p.N = parse_integer(value, full);
      else throw ConfigError("unknown key '" + full + "'");
    } else if (section == "truncation") {
      auto& t = config.policy;
      if (key == "initial_n_max") t.initial_n_max = parse_int(value, full);
      else if (key == "growth_factor") t.growth_factor = parse_int(value, full);
      else if (key == "tail_tolerance") t.tail_tolerance = parse_real(value, full);
      else if (key == "guard_band") t.guard_band = parse_int(value, full);
      else if (key == "max_n_max") t.max_n_max = parse_int(value, full);
      else throw ConfigError("unknown key '" + full + "'");
    } else if (section == "sweep") {
      has_sweep = true;
      if (key == "axis") sweep.axis = value;
      else if (key == "start") sweep.start = value;
      else if (key == "stop") sweep.stop = value;
      else if (key == "count") sweep.count = value;
      else if (key == "outputs") sweep.outputs = value;
      else if (key == "series") sweep.series = value;
      else throw ConfigError("unknown key '" + full + "'");
    } else {
      throw ConfigError("unknown section '" + section + "'");
    }
  }

  Config finish() {
    if (has_sweep) {
      sweep::SweepSpec s;
      if (config.sweep) s = *config.sweep;
      s.fixed = config.point;
      try {
        if (sweep.axis) s.axis = sweep::parse_axis(*sweep.axis);
        else if (!config.sweep) throw ConfigError("sweep.axis is required");
        auto endpoint = [&](const std::string& v, const char* key) {
          const std::string full = std::string("sweep.") + key;
          return s.axis == sweep::Axis::phi ? parse_angle_value(v, full) : parse_real(v, full);
        };
        if (sweep.start) s.range.start = endpoint(*sweep.start, "start");
        if (sweep.stop) s.range.stop = endpoint(*sweep.stop, "stop");
        if (sweep.count) s.range.count = parse_int(*sweep.count, "sweep.count");
        if (sweep.series) s.series = *sweep.series;
        if (sweep.outputs) {
          s.outputs.clear();
          std::stringstream list(*sweep.outputs);
          std::string item;
          while (std::getline(list, item, ',')) {
            item = trim(item);
            if (!item.empty()) s.outputs.insert(sweep::parse_output(item));
          }
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
      }
      config.sweep = s;
    } else if (config.sweep) {
      config.sweep->fixed = config.point;
    }
    config.validate();
    return config;
  }
};

void apply_assignment(Builder& b, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  std::string section = "point";
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  }
  b.set(section, key, value);
}

}  // namespace

void Config::validate() const {
  try {
    point.validate();
    policy.validate();
    if (sweep) sweep->validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

Config parse(std::istream& in, const std::string& source) {
  Builder b;
  std::string section = "point";
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "point" && section != "sweep" && section != "truncation") {
        throw ConfigError(where + "unknown section '" + section + "'");
      }
      if (section == "sweep") b.has_sweep = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    try {
      b.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return b.finish();
}

Config load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void apply_override(Config& config, const std::string& assignment) {
  apply_overrides(config, {assignment});
}

void apply_overrides(Config& config, const std::vector<std::string>& assignments) {
  Builder b;
  b.config = config;
  for (const auto& a : assignments) apply_assignment(b, a);
  config = b.finish();
}

}  // namespace spac::config
