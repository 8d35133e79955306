#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "carl/dynamics.hpp"
#include "carl/error.hpp"
#include "carl/params.hpp"

namespace carl {

struct BurstMetrics {
  bool has_burst = false;
  double first_peak_height = 0;  // W
  double first_peak_time = 0;    // s
  int first_peak_index = -1;
  double first_peak_pump = 0;  // concurrent P+ at the peak (W)
  double delay = std::numeric_limits<double>::quiet_NaN();  // s
  std::vector<double> revival_times;
  int revival_count = 0;
};

// Backscatter floor as it appears in the measurement: the empty-cavity
// steady-state ratio applied to the concurrent pump power.
inline std::vector<double> backscatter_baseline(const Trajectory& traj, double ratio) {
  std::vector<double> base(traj.p_plus.size());
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = ratio * traj.p_plus[i];
  return base;
}

namespace detail {

// Local maxima of y with prominence >= min_prominence * max(y).  Prominence
// is the drop to the higher of the two bracketing minima, scanning outward
// until a taller sample is met.
inline std::vector<int> prominent_peaks(const std::vector<double>& y,
                                        double min_prominence) {
  std::vector<int> out;
  const int n = static_cast<int>(y.size());
  if (n < 3) return out;
  const double g = *std::max_element(y.begin(), y.end());
  for (int i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    double left = y[i];
    for (int j = i - 1; j >= 0 && y[j] <= y[i]; --j) left = std::min(left, y[j]);
    double right = y[i];
    for (int j = i + 1; j < n && y[j] <= y[i]; ++j) right = std::min(right, y[j]);
    if (y[i] - std::max(left, right) >= min_prominence * g) out.push_back(i);
  }
  return out;
}

}  // namespace detail

// Burst metrics against a per-sample baseline trace (same length as the
// trajectory).  Revivals are peaks after the first that still clear three
// times the baseline.
inline BurstMetrics detect_bursts(const Trajectory& traj,
                                  const std::vector<double>& baseline,
                                  double min_prominence = 0.1) {
  if (traj.t.empty()) throw invalid_parameter("trajectory is empty");
  if (baseline.size() != traj.t.size())
    throw invalid_parameter("baseline length must match the trajectory");
  for (double b : baseline)
    if (b < 0) throw invalid_parameter("baseline must be nonnegative");

  BurstMetrics m;
  const auto& p = traj.p_minus;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 10.0 * baseline[i]) {
      m.delay = traj.t[i] - traj.t.front();
      break;
    }
  }
  const auto idx = detail::prominent_peaks(p, min_prominence);
  for (int i : idx) {
    if (!(p[i] > baseline[i])) continue;
    if (!m.has_burst) {
      m.has_burst = true;
      m.first_peak_index = i;
      m.first_peak_height = p[i];
      m.first_peak_time = traj.t[i];
      m.first_peak_pump = traj.p_plus[i];
    } else if (p[i] > 3.0 * baseline[i]) {
      m.revival_times.push_back(traj.t[i]);
    }
  }
  m.revival_count = static_cast<int>(m.revival_times.size());
  return m;
}

inline BurstMetrics detect_bursts(const Trajectory& traj, double baseline,
                                  double min_prominence = 0.1) {
  return detect_bursts(traj, std::vector<double>(traj.t.size(), baseline),
                       min_prominence);
}

// 10-90% rise time of the first burst: interpolated last upcrossings of the
// two levels before the peak.  NaN if either level is never crossed.
inline double rise_time_10_90(const Trajectory& traj, int peak_index,
                              double baseline) {
  const auto& p = traj.p_minus;
  if (peak_index <= 0 || peak_index >= static_cast<int>(p.size()))
    throw invalid_parameter("peak index out of range");
  const double h = p[peak_index];
  auto last_upcross = [&](double level) {
    for (int j = peak_index; j > 0; --j) {
      if (p[j - 1] < level && level <= p[j]) {
        const double f = (level - p[j - 1]) / (p[j] - p[j - 1]);
        return traj.t[j - 1] + f * (traj.t[j] - traj.t[j - 1]);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double lo = last_upcross(baseline + 0.1 * (h - baseline));
  const double hi = last_upcross(baseline + 0.9 * (h - baseline));
  return hi - lo;
}

struct GrowthFit {
  double rate = 0;      // field amplitude growth rate (1/s)
  double residual = 0;  // rms residual of ln P_- about the fit
  int n_samples = 0;
};

// Least-squares slope of ln P_-(t) over [t0, t1]; the intensity grows at
// twice the amplitude rate.
inline GrowthFit fit_growth_rate(const Trajectory& traj, double t0, double t1) {
  if (!(t0 < t1)) throw invalid_parameter("growth window must have t0 < t1");
  if (traj.t.empty() || t0 < traj.t.front() || t1 > traj.t.back())
    throw invalid_parameter("growth window outside the trajectory");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    if (traj.t[i] < t0 || traj.t[i] > t1) continue;
    if (traj.p_minus[i] <= 0)
      throw invalid_parameter("nonpositive reverse power in growth window");
    x.push_back(traj.t[i]);
    y.push_back(std::log(traj.p_minus[i]));
  }
  if (x.size() < 2) throw invalid_parameter("growth window holds fewer than two samples");
  const int n = static_cast<int>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw invalid_parameter("degenerate growth window");
  const double slope = sxy / sxx;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    ss += r * r;
  }
  GrowthFit f;
  f.rate = slope / 2.0;
  f.residual = std::sqrt(ss / n);
  f.n_samples = n;
  return f;
}

struct DispersionResult {
  std::vector<double> detuning;      // probe-detuning grid (rad/s)
  std::vector<double> rate;          // max Re eigenvalue (1/s)
  std::vector<double> emitted_freq;  // -Im of the dominant eigenvalue (rad/s)
  double peak_rate = 0;
  double peak_detuning = 0;
  double gain_bandwidth = 0;  // FWHM over emitted frequency (rad/s)
  bool no_gain = false;
};

namespace detail {

// Roots of the monic complex cubic z^3 + a2 z^2 + a1 z + a0 via Cardano,
// polished with Newton steps.
inline std::array<complexd, 3> solve_cubic(complexd a2, complexd a1, complexd a0) {
  std::array<complexd, 3> roots;
  if (a0 == complexd(0.0, 0.0)) {  // z * (z^2 + a2 z + a1): exact factorization
    const complexd disc2 = std::sqrt(a2 * a2 - 4.0 * a1);
    roots = {complexd(0, 0), (-a2 + disc2) / 2.0, (-a2 - disc2) / 2.0};
    return roots;
  }
  const complexd p = a1 - a2 * a2 / 3.0;
  const complexd q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  if (std::abs(p) == 0.0 && std::abs(q) == 0.0) {
    roots.fill(-a2 / 3.0);
    return roots;
  }
  const complexd disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  complexd c = std::pow(-q / 2.0 + disc, 1.0 / 3.0);
  if (std::abs(c) < 1e-30) c = std::pow(-q / 2.0 - disc, 1.0 / 3.0);
  const complexd omega(-0.5, 0.86602540378443864676);
  complexd ck = c;
  for (int k = 0; k < 3; ++k) {
    complexd z = ck - p / (3.0 * ck) - a2 / 3.0;
    for (int it = 0; it < 3; ++it) {  // Newton polish
      const complexd f = ((z + a2) * z + a1) * z + a0;
      const complexd df = (3.0 * z + 2.0 * a2) * z + a1;
      if (std::abs(df) == 0.0) break;
      z -= f / df;
    }
    roots[k] = z;
    ck *= omega;
  }
  return roots;
}

}  // namespace detail

// Detuning grid wide enough to capture the half-maximum region of the gain
// curve for both regimes.
inline std::vector<double> dispersion_grid(const ModelParams& m, double span = 40.0,
                                           int n_points = 4001) {
  std::vector<double> g(n_points);
  for (int i = 0; i < n_points; ++i)
    g[i] = -span * m.kappa + 2.0 * span * m.kappa * i / (n_points - 1);
  return g;
}

// Linear stability of the T = 0 unbunched state with the pump at its steady
// value.  The closed system in (b, s, conj(a-)) with s = <omega_r u e^{-i
// theta}> has characteristic cubic
//   lambda^2 (lambda + kappa - i Delta) = -i * 2 omega_r U0^2 N n .
// The growth rate at each probe detuning is the largest Re(lambda); the gain
// bandwidth is the half-maximum width over the emitted-light frequency
// -Im(lambda) of the dominant branch, which is what a spectrum of the
// reverse field measures.
inline DispersionResult linear_dispersion(const ModelParams& m,
                                          const std::vector<double>& grid) {
  if (grid.empty()) throw invalid_parameter("detuning grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw invalid_parameter("detuning grid must be strictly increasing");

  DispersionResult r;
  r.detuning = grid;
  r.rate.resize(grid.size());
  r.emitted_freq.resize(grid.size());

  const double c2 = 2.0 * m.omega_r * m.u0 * m.u0 * m.atom_number * m.n_target;
  const complexd i_unit(0.0, 1.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto roots =
        detail::solve_cubic(complexd(m.kappa, -grid[k]), complexd(0, 0), i_unit * c2);
    int best = 0;
    for (int j = 1; j < 3; ++j)
      if (roots[j].real() > roots[best].real()) best = j;
    r.rate[k] = roots[best].real();
    r.emitted_freq[k] = -roots[best].imag();
  }

  const auto it = std::max_element(r.rate.begin(), r.rate.end());
  r.peak_rate = *it;
  r.peak_detuning = grid[it - r.rate.begin()];
  // roundoff floor: stable roots come back as +-eps around zero
  const double tiny =
      1e-12 * (m.kappa + std::max(std::abs(grid.front()), std::abs(grid.back())));
  if (r.peak_rate <= tiny) {
    r.peak_rate = std::max(r.peak_rate, 0.0);
    r.no_gain = true;
    r.gain_bandwidth = 0;
    return r;
  }

  // Half-maximum width in emitted frequency: sort the (freq, rate) samples,
  // take the extreme interpolated crossings of rate = peak/2.
  const double hm = r.peak_rate / 2.0;
  std::vector<int> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return r.emitted_freq[a] < r.emitted_freq[b]; });
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double f = r.emitted_freq[order[k]];
    const double v = r.rate[order[k]];
    if (v >= hm) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    if (k + 1 < order.size()) {
      const double f2 = r.emitted_freq[order[k + 1]];
      const double v2 = r.rate[order[k + 1]];
      if ((v - hm) * (v2 - hm) < 0) {
        const double fc = f + (hm - v) * (f2 - f) / (v2 - v);
        lo = std::min(lo, fc);
        hi = std::max(hi, fc);
      }
    }
  }
  r.gain_bandwidth = (hi > lo) ? hi - lo : 0.0;
  return r;
}

// Bragg-order populations: order n holds u in [2n-1, 2n+1).
inline std::map<int, double> momentum_orders(const AtomEnsemble& e) {
  std::map<int, double> frac;
  const double inv = 1.0 / e.size();
  for (double u : e.u) {
    const int order = static_cast<int>(std::floor((u + 1.0) / 2.0));
    frac[order] += inv;
  }
  return frac;
}

struct PowerLawFit {
  double exponent = 0;
  double prefactor = 0;
  double r_squared = 0;
  double exponent_stderr = 0;
  int n_points = 0;
};

// Ordinary least squares on (ln x, ln y), restricted to x in [x_min, x_max].
inline PowerLawFit fit_power_law(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 double x_min = 0,
                                 double x_max = std::numeric_limits<double>::infinity()) {
  if (x.size() != y.size()) throw invalid_parameter("x and y lengths differ");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_min || x[i] > x_max) continue;
    if (x[i] <= 0 || y[i] <= 0)
      throw invalid_parameter("power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 3) throw invalid_parameter("power-law fit needs at least three points");
  double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw invalid_parameter("degenerate abscissa in power-law fit");
  PowerLawFit f;
  f.n_points = n;
  f.exponent = sxy / sxx;
  f.prefactor = std::exp(my - f.exponent * mx);
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - my - f.exponent * (lx[i] - mx);
    ss_res += r * r;
  }
  f.r_squared = (syy > 0) ? 1.0 - ss_res / syy : 1.0;
  f.exponent_stderr = (n > 2) ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace carl
