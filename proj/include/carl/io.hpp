#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "carl/config.hpp"
#include "carl/dynamics.hpp"
#include "carl/error.hpp"

namespace carl {

// 17 significant digits: doubles round-trip bit-exactly through the files.
inline std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open '" + path + "' for writing");
  out << "t_us,P_plus_W,P_minus_W,re_b,im_b,abs_b,mean_u,std_u\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    out << format_double(traj.t[i] * 1e6) << ',' << format_double(traj.p_plus[i])
        << ',' << format_double(traj.p_minus[i]) << ','
        << format_double(traj.b[i].real()) << ',' << format_double(traj.b[i].imag())
        << ',' << format_double(std::abs(traj.b[i])) << ','
        << format_double(traj.mean_u[i]) << ',' << format_double(traj.std_u[i])
        << '\n';
  }
  if (traj.failed)
    out << "# integration failed at t_us = " << format_double(traj.failure_time * 1e6)
        << '\n';
}

// Two-column recorded pump trace: t_seconds, eta_rad_per_s; header required.
inline PumpProfile read_pump_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open pump trace '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw config_error("pump trace '" + path + "' is empty");
  if (line.find("t_seconds") == std::string::npos)
    throw config_error("pump trace '" + path + "' lacks the required header row", 1);
  std::vector<std::pair<double, double>> samples;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
      throw config_error("pump trace needs two comma-separated columns", lineno);
    try {
      samples.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      throw config_error("cannot parse pump trace numbers", lineno);
    }
    if (samples.back().second < 0)
      throw config_error("pump amplitude must be nonnegative", lineno);
  }
  try {
    return PumpProfile::recorded(std::move(samples));
  } catch (const invalid_parameter& e) {
    throw config_error(std::string(e.what()) + " in '" + path + "'");
  }
}

inline void write_key_values(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

}  // namespace carl
