#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "carl/analysis.hpp"
#include "carl/config.hpp"
#include "carl/simulate.hpp"

namespace carl {

struct SweepPoint {
  double value = 0;
  double pump_power = 0;  // W, after applying the swept value
  std::vector<std::uint64_t> seeds;
  std::vector<double> peak_heights;  // per successful replicate (W)
  double mean_peak_height = 0;
  double mean_peak_time = 0;  // s
  double mean_delay = 0;      // s, NaN when the threshold is never crossed
  double mean_revival_count = 0;
  int failed_replicates = 0;
  bool failed = false;  // every replicate failed
  bool in_fit = false;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepPoint> points;
  PowerLawFit fit;
  bool fit_valid = false;
  double threshold_value = 0;  // first swept value above the backscatter gate
  int warning_count = 0;       // failed replicates across the sweep
};

namespace detail {

inline RunConfig with_value(const RunConfig& base, const std::string& parameter,
                            double value) {
  RunConfig cfg = base;
  if (parameter == "atom_number") cfg.physical.atom_number = value;
  else if (parameter == "pump_power") cfg.physical.pump_power = value;
  else if (parameter == "temperature") cfg.physical.temperature = value;
  else throw invalid_parameter("unknown sweep parameter '" + parameter + "'");
  return cfg;
}

}  // namespace detail

// Deterministic parameter sweep: replicate r uses the same seed at every
// point (common random numbers), points are independent and may run on
// several threads.  The power-law fit excludes the below-threshold region of
// the swept range; threshold is the first value whose mean peak clears three
// times the backscatter steady state.
inline SweepResult run_sweep(const RunConfig& base, const SweepConfig& sw,
                             int threads = 1) {
  if (sw.values.size() < 3) throw invalid_parameter("sweep needs at least three values");
  if (sw.replicates < 1) throw invalid_parameter("replicates must be >= 1");
  const auto seeds = sw.resolved_seeds(base.simulation.seed);

  SweepResult result;
  result.parameter = sw.parameter;
  result.points.resize(sw.values.size());

  auto run_point = [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.value = sw.values[i];
    const RunConfig cfg = detail::with_value(base, sw.parameter, sw.values[i]);
    pt.pump_power = cfg.physical.pump_power;
    double sum_h = 0, sum_t = 0, sum_d = 0, sum_rev = 0;
    int n_delay = 0;
    for (auto seed : seeds) {
      RunResult r = run_simulation(cfg, seed);
      if (r.trajectory.failed) {
        ++pt.failed_replicates;
        continue;
      }
      pt.seeds.push_back(seed);
      pt.peak_heights.push_back(r.metrics.first_peak_height);
      sum_h += r.metrics.first_peak_height;
      sum_t += r.metrics.first_peak_time;
      sum_rev += r.metrics.revival_count;
      if (std::isfinite(r.metrics.delay)) {
        sum_d += r.metrics.delay;
        ++n_delay;
      }
    }
    const int n_ok = static_cast<int>(pt.peak_heights.size());
    if (n_ok == 0) {
      pt.failed = true;
      return;
    }
    pt.mean_peak_height = sum_h / n_ok;
    pt.mean_peak_time = sum_t / n_ok;
    pt.mean_delay = n_delay ? sum_d / n_delay : std::numeric_limits<double>::quiet_NaN();
    pt.mean_revival_count = sum_rev / n_ok;
  };

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(sw.values.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < sw.values.size(); ++i) run_point(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < sw.values.size(); i = next++) run_point(i);
      });
    for (auto& th : pool) th.join();
  }

  for (const auto& pt : result.points) result.warning_count += pt.failed_replicates;

  // Threshold gate and fit range.
  std::size_t first_fit = result.points.size();
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& pt = result.points[i];
    if (pt.failed) continue;
    if (pt.mean_peak_height > 3.0 * base.physical.backscatter_ratio * pt.pump_power) {
      first_fit = i;
      result.threshold_value = pt.value;
      break;
    }
  }
  std::vector<double> fx, fy;
  for (std::size_t i = first_fit; i < result.points.size(); ++i) {
    auto& pt = result.points[i];
    if (pt.failed || pt.mean_peak_height <= 0) continue;
    pt.in_fit = true;
    fx.push_back(pt.value);
    fy.push_back(pt.mean_peak_height);
  }
  if (fx.size() >= 3) {
    result.fit = fit_power_law(fx, fy);
    result.fit_valid = true;
  }
  return result;
}

// One row per point plus a summary row carrying the fitted exponent.
inline void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open '" + path + "' for writing");
  out << "kind,value,mean_first_peak_W,mean_first_peak_time_us,mean_delay_us,"
         "mean_revival_count,failed_replicates,in_fit,exponent,exponent_stderr,"
         "r_squared\n";
  for (const auto& pt : r.points) {
    out << "point," << format_double(pt.value) << ','
        << format_double(pt.mean_peak_height) << ','
        << format_double(pt.mean_peak_time * 1e6) << ','
        << format_double(pt.mean_delay * 1e6) << ','
        << format_double(pt.mean_revival_count) << ',' << pt.failed_replicates << ','
        << (pt.in_fit ? 1 : 0) << ",,,\n";
  }
  out << "summary,,,,,,,,";
  if (r.fit_valid)
    out << format_double(r.fit.exponent) << ','
        << format_double(r.fit.exponent_stderr) << ','
        << format_double(r.fit.r_squared);
  else
    out << ",,";
  out << '\n';
}

}  // namespace carl
