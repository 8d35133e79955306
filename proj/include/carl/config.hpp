#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "carl/error.hpp"
#include "carl/params.hpp"
#include "carl/rng.hpp"

namespace carl {

struct SimulationConfig {
  int n_sim = 100;
  double t_end = 200e-6;     // s
  double sample_dt = 2e-7;   // s
  double tol = 1e-8;
  std::uint64_t seed = 1;
  enum class Quiet { Auto, On, Off } quiet_start = Quiet::Auto;  // Auto: quiet iff T = 0
  std::optional<double> delta_c;  // rad/s, overrides the servo default
};

struct PumpConfig {
  enum class Type { Ramp, Recorded } type = Type::Ramp;
  double tau_bw = defaults::pump_buildup_time;  // s
  std::string file;  // recorded-trace CSV
};

struct OutputConfig {
  std::string trajectory = "trajectory.csv";
  std::string metrics = "metrics.txt";
  std::string sweep = "sweep.csv";
};

struct RunConfig {
  PhysicalParams physical;
  SimulationConfig simulation;
  PumpConfig pump;
  OutputConfig output;

  bool quiet_start_resolved() const {
    switch (simulation.quiet_start) {
      case SimulationConfig::Quiet::On: return true;
      case SimulationConfig::Quiet::Off: return false;
      default: return physical.temperature == 0.0;
    }
  }
};

struct SweepConfig {
  std::string parameter;  // atom_number | pump_power | temperature
  std::vector<double> values;
  int replicates = 3;
  std::vector<std::uint64_t> seeds;  // one per replicate; filled from the master seed

  std::vector<std::uint64_t> resolved_seeds(std::uint64_t master) const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> s(replicates);
    for (int r = 0; r < replicates; ++r) s[r] = derive_seed(master, r);
    return s;
  }
};

struct Config {
  RunConfig run;
  std::optional<SweepConfig> sweep;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// "value [suffix]" with the documented unit suffixes; frequency suffixes
// convert to angular rad/s, everything else to SI base units.
inline double parse_quantity(const std::string& raw, int line) {
  const std::string s = trim(raw);
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw config_error("cannot parse number '" + s + "'", line);
  }
  const std::string suffix = trim(s.substr(pos));
  if (suffix.empty()) return v;
  static const std::map<std::string, double> scale = {
      {"nm", 1e-9}, {"um", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0},
      {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0},
      {"uK", 1e-6}, {"mK", 1e-3}, {"K", 1.0},
      {"uW", 1e-6}, {"mW", 1e-3}, {"W", 1.0},
      {"Hz", constants::two_pi},
      {"kHz", constants::two_pi * 1e3},
      {"MHz", constants::two_pi * 1e6},
      {"GHz", constants::two_pi * 1e9},
  };
  auto it = scale.find(suffix);
  if (it == scale.end())
    throw config_error("unknown unit suffix '" + suffix + "'", line);
  return v * it->second;
}

inline bool parse_bool(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw config_error("cannot parse boolean '" + s + "'", line);
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::vector<std::pair<std::string, Entry>>;

}  // namespace detail

// INI-style sections [physical], [simulation], [pump], [output], [sweep];
// '#' and ';' start comments.  Unknown sections, unknown keys, and duplicate
// keys are errors naming the line.
inline Config parse_config(const std::string& text) {
  static const std::set<std::string> known_sections = {"physical", "simulation",
                                                       "pump", "output", "sweep"};
  std::map<std::string, detail::Section> sections;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::size_t cut = raw.find_first_of("#;");
    std::string s = detail::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw config_error("malformed section header", line);
      current = detail::trim(s.substr(1, s.size() - 2));
      if (!known_sections.count(current))
        throw config_error("unknown section '" + current + "'", line);
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw config_error("expected key = value", line);
    if (current.empty()) throw config_error("key outside any section", line);
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw config_error("empty key", line);
    for (const auto& [k, e] : sections[current])
      if (k == key)
        throw config_error("duplicate key '" + key + "' (first at line " +
                               std::to_string(e.line) + ")",
                           line);
    sections[current].push_back({key, {value, line}});
  }

  Config cfg;
  bool finesse_given = false, decay_given = false;

  for (const auto& [key, e] : sections["physical"]) {
    auto& p = cfg.run.physical;
    const auto& v = e.value;
    if (key == "wavelength") p.wavelength = detail::parse_quantity(v, e.line);
    else if (key == "d1_wavelength") p.d1_wavelength = detail::parse_quantity(v, e.line);
    else if (key == "atomic_linewidth") p.atomic_linewidth = detail::parse_quantity(v, e.line);
    else if (key == "cavity_length") p.cavity_length = detail::parse_quantity(v, e.line);
    else if (key == "waist") p.waist = detail::parse_quantity(v, e.line);
    else if (key == "finesse") { p.finesse = detail::parse_quantity(v, e.line); finesse_given = true; }
    else if (key == "decay_time") { p.decay_time = detail::parse_quantity(v, e.line); decay_given = true; }
    else if (key == "atom_number") p.atom_number = detail::parse_quantity(v, e.line);
    else if (key == "pump_power") p.pump_power = detail::parse_quantity(v, e.line);
    else if (key == "temperature") p.temperature = detail::parse_quantity(v, e.line);
    else if (key == "atom_mass") p.atom_mass = detail::parse_quantity(v, e.line);
    else if (key == "coupling_g") p.coupling_g_override = detail::parse_quantity(v, e.line);
    else if (key == "coupling_from_geometry") {
      if (detail::parse_bool(v, e.line)) p.coupling_g_override.reset();
    }
    else if (key == "backscatter_ratio") p.backscatter_ratio = detail::parse_quantity(v, e.line);
    else if (key == "backscatter_phase") p.backscatter_phase = detail::parse_quantity(v, e.line);
    else throw config_error("unknown key '" + key + "' in [physical]", e.line);
  }
  if (finesse_given && !decay_given) cfg.run.physical.decay_time.reset();
  if (finesse_given && decay_given)
    throw config_error("give exactly one of finesse and decay_time");

  for (const auto& [key, e] : sections["simulation"]) {
    auto& s = cfg.run.simulation;
    const auto& v = e.value;
    if (key == "n_sim") s.n_sim = static_cast<int>(detail::parse_quantity(v, e.line));
    else if (key == "t_end") s.t_end = detail::parse_quantity(v, e.line);
    else if (key == "sample_dt") s.sample_dt = detail::parse_quantity(v, e.line);
    else if (key == "tol") s.tol = detail::parse_quantity(v, e.line);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(std::stoull(detail::trim(v)));
    else if (key == "quiet_start") {
      const std::string q = detail::trim(v);
      if (q == "auto") s.quiet_start = SimulationConfig::Quiet::Auto;
      else s.quiet_start = detail::parse_bool(v, e.line) ? SimulationConfig::Quiet::On
                                                         : SimulationConfig::Quiet::Off;
    }
    else if (key == "delta_c") s.delta_c = detail::parse_quantity(v, e.line);
    else throw config_error("unknown key '" + key + "' in [simulation]", e.line);
  }

  for (const auto& [key, e] : sections["pump"]) {
    auto& p = cfg.run.pump;
    const auto& v = e.value;
    if (key == "type") {
      const std::string t = detail::trim(v);
      if (t == "ramp") p.type = PumpConfig::Type::Ramp;
      else if (t == "recorded") p.type = PumpConfig::Type::Recorded;
      else throw config_error("pump type must be ramp or recorded", e.line);
    }
    else if (key == "tau_bw") p.tau_bw = detail::parse_quantity(v, e.line);
    else if (key == "file") p.file = detail::trim(v);
    else throw config_error("unknown key '" + key + "' in [pump]", e.line);
  }
  if (cfg.run.pump.type == PumpConfig::Type::Recorded && cfg.run.pump.file.empty())
    throw config_error("recorded pump requires a file");

  for (const auto& [key, e] : sections["output"]) {
    auto& o = cfg.run.output;
    if (key == "trajectory") o.trajectory = detail::trim(e.value);
    else if (key == "metrics") o.metrics = detail::trim(e.value);
    else if (key == "sweep") o.sweep = detail::trim(e.value);
    else throw config_error("unknown key '" + key + "' in [output]", e.line);
  }

  if (sections.count("sweep") && !sections["sweep"].empty()) {
    SweepConfig sw;
    std::optional<double> log_start, log_stop;
    int log_points = 0;
    for (const auto& [key, e] : sections["sweep"]) {
      const auto& v = e.value;
      if (key == "parameter") {
        sw.parameter = detail::trim(v);
        if (sw.parameter != "atom_number" && sw.parameter != "pump_power" &&
            sw.parameter != "temperature")
          throw config_error("sweep parameter must be atom_number, pump_power, or temperature",
                             e.line);
      }
      else if (key == "values") {
        for (const auto& item : detail::split_csv(v))
          sw.values.push_back(detail::parse_quantity(item, e.line));
      }
      else if (key == "log_start") log_start = detail::parse_quantity(v, e.line);
      else if (key == "log_stop") log_stop = detail::parse_quantity(v, e.line);
      else if (key == "log_points") log_points = static_cast<int>(detail::parse_quantity(v, e.line));
      else if (key == "replicates") sw.replicates = static_cast<int>(detail::parse_quantity(v, e.line));
      else if (key == "seeds") {
        for (const auto& item : detail::split_csv(v))
          sw.seeds.push_back(static_cast<std::uint64_t>(std::stoull(item)));
      }
      else throw config_error("unknown key '" + key + "' in [sweep]", e.line);
    }
    if (sw.parameter.empty()) throw config_error("sweep section requires parameter");
    if (log_start || log_stop || log_points) {
      if (!(log_start && log_stop && log_points >= 2))
        throw config_error("logarithmic range requires log_start, log_stop, log_points >= 2");
      if (!sw.values.empty())
        throw config_error("give either values or a logarithmic range, not both");
      const double ratio = *log_stop / *log_start;
      for (int i = 0; i < log_points; ++i)
        sw.values.push_back(*log_start *
                            std::pow(ratio, static_cast<double>(i) / (log_points - 1)));
    }
    if (sw.values.empty()) throw config_error("sweep value list is empty");
    if (sw.replicates < 1) throw config_error("replicates must be >= 1");
    if (!sw.seeds.empty() && static_cast<int>(sw.seeds.size()) != sw.replicates)
      throw config_error("seed list length must equal replicates");
    cfg.sweep = std::move(sw);
  }

  try {
    cfg.run.physical.validate();
  } catch (const invalid_parameter& e) {
    throw config_error(e.what());
  }
  if (cfg.run.simulation.n_sim < 2) throw config_error("n_sim must be >= 2");
  if (cfg.run.simulation.t_end < 0) throw config_error("t_end must be nonnegative");
  if (cfg.run.simulation.sample_dt <= 0) throw config_error("sample_dt must be positive");
  if (cfg.run.simulation.tol < 1e-12 || cfg.run.simulation.tol > 1e-3)
    throw config_error("tol must lie in [1e-12, 1e-3]");
  if (cfg.run.pump.tau_bw <= 0) throw config_error("tau_bw must be positive");
  return cfg;
}

// Canonical text form; parse_config(serialize_config(c)) reproduces c.
// Values are emitted in internal units (SI / rad/s) without suffixes.
inline std::string serialize_config(const Config& cfg) {
  std::ostringstream out;
  out.precision(17);
  const auto& p = cfg.run.physical;
  out << "[physical]\n";
  out << "wavelength = " << p.wavelength << "\n";
  out << "d1_wavelength = " << p.d1_wavelength << "\n";
  out << "atomic_linewidth = " << p.atomic_linewidth / constants::two_pi << " Hz\n";
  out << "cavity_length = " << p.cavity_length << "\n";
  out << "waist = " << p.waist << "\n";
  if (p.finesse) out << "finesse = " << *p.finesse << "\n";
  if (p.decay_time && !p.finesse) out << "decay_time = " << *p.decay_time << "\n";
  out << "atom_number = " << p.atom_number << "\n";
  out << "pump_power = " << p.pump_power << "\n";
  out << "temperature = " << p.temperature << "\n";
  out << "atom_mass = " << p.atom_mass << "\n";
  if (p.coupling_g_override)
    out << "coupling_g = " << *p.coupling_g_override / constants::two_pi << " Hz\n";
  else
    out << "coupling_from_geometry = true\n";
  out << "backscatter_ratio = " << p.backscatter_ratio << "\n";
  out << "backscatter_phase = " << p.backscatter_phase << "\n";

  const auto& s = cfg.run.simulation;
  out << "\n[simulation]\n";
  out << "n_sim = " << s.n_sim << "\n";
  out << "t_end = " << s.t_end << "\n";
  out << "sample_dt = " << s.sample_dt << "\n";
  out << "tol = " << s.tol << "\n";
  out << "seed = " << s.seed << "\n";
  out << "quiet_start = "
      << (s.quiet_start == SimulationConfig::Quiet::Auto
              ? "auto"
              : (s.quiet_start == SimulationConfig::Quiet::On ? "true" : "false"))
      << "\n";
  if (s.delta_c) out << "delta_c = " << *s.delta_c << "\n";

  const auto& pu = cfg.run.pump;
  out << "\n[pump]\n";
  out << "type = " << (pu.type == PumpConfig::Type::Ramp ? "ramp" : "recorded") << "\n";
  out << "tau_bw = " << pu.tau_bw << "\n";
  if (!pu.file.empty()) out << "file = " << pu.file << "\n";

  const auto& o = cfg.run.output;
  out << "\n[output]\n";
  out << "trajectory = " << o.trajectory << "\n";
  out << "metrics = " << o.metrics << "\n";
  out << "sweep = " << o.sweep << "\n";

  if (cfg.sweep) {
    const auto& sw = *cfg.sweep;
    out << "\n[sweep]\n";
    out << "parameter = " << sw.parameter << "\n";
    out << "values = ";
    for (std::size_t i = 0; i < sw.values.size(); ++i)
      out << (i ? ", " : "") << sw.values[i];
    out << "\n";
    out << "replicates = " << sw.replicates << "\n";
    if (!sw.seeds.empty()) {
      out << "seeds = ";
      for (std::size_t i = 0; i < sw.seeds.size(); ++i)
        out << (i ? ", " : "") << sw.seeds[i];
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace carl
