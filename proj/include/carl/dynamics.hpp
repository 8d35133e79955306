#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "carl/error.hpp"
#include "carl/params.hpp"
#include "carl/rng.hpp"

namespace carl {

using complexd = std::complex<double>;

// Macro-atom phase-space coordinates: theta_j = 2 k x_j, u_j = p_j / (hbar k).
struct AtomEnsemble {
  std::vector<double> theta;
  std::vector<double> u;
  double weight = 1.0;  // real atoms per macro-atom

  int size() const { return static_cast<int>(theta.size()); }
};

struct FieldState {
  complexd a_plus{0, 0};
  complexd a_minus{0, 0};
};

struct SimState {
  double t = 0;
  AtomEnsemble ensemble;
  FieldState fields;
};

// Pump drive amplitude eta(t).
struct PumpProfile {
  enum class Kind { Ramp, Recorded };
  Kind kind = Kind::Ramp;
  double eta_max = 0;
  double tau_bw = defaults::pump_buildup_time;
  std::vector<std::pair<double, double>> samples;  // (t, eta), strictly increasing t

  static PumpProfile ramp(double eta_max, double tau_bw) {
    PumpProfile p;
    p.kind = Kind::Ramp;
    p.eta_max = eta_max;
    p.tau_bw = tau_bw;
    return p;
  }

  static PumpProfile recorded(std::vector<std::pair<double, double>> samples) {
    if (samples.empty())
      throw invalid_parameter("recorded pump profile needs at least one sample");
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (samples[i].first <= samples[i - 1].first)
        throw invalid_parameter("recorded pump samples must be strictly increasing in time");
    PumpProfile p;
    p.kind = Kind::Recorded;
    p.samples = std::move(samples);
    return p;
  }
};

inline double pump_eval(const PumpProfile& p, double t) {
  if (p.kind == PumpProfile::Kind::Ramp)
    return p.eta_max * (1.0 - std::exp(-t / p.tau_bw));
  const auto& s = p.samples;
  if (t <= s.front().first) return s.front().second;
  if (t >= s.back().first) return s.back().second;
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double v, const auto& q) { return v < q.first; });
  const auto& [t1, e1] = *(it - 1);
  const auto& [t2, e2] = *it;
  return e1 + (e2 - e1) * (t - t1) / (t2 - t1);
}

// Draw initial macro-atom coordinates.  Quiet start puts the phases on a
// regular grid so that all bunching harmonics vanish; otherwise uniform
// pseudorandom phases carry shot noise |b| ~ n_sim^{-1/2} which seeds the
// instability.  Momentum spread sigma_u = sigma_v / omega_r in hbar*k units.
inline AtomEnsemble sample_ensemble(int n_sim, double temperature, const ModelParams& m,
                                    std::uint64_t seed, bool quiet_start) {
  if (n_sim < 2) throw invalid_parameter("need at least two macro-atoms");
  if (temperature < 0) throw invalid_parameter("temperature must be nonnegative");
  AtomEnsemble e;
  e.theta.resize(n_sim);
  e.u.assign(n_sim, 0.0);
  e.weight = m.weight;
  Rng rng(seed);
  if (quiet_start) {
    for (int j = 0; j < n_sim; ++j)
      e.theta[j] = constants::two_pi * j / n_sim;
  } else {
    for (int j = 0; j < n_sim; ++j)
      e.theta[j] = rng.uniform(0.0, constants::two_pi);
  }
  if (temperature > 0) {
    const double sigma_u = m.sigma_v / m.omega_r;
    for (int j = 0; j < n_sim; ++j) e.u[j] = rng.normal(0.0, sigma_u);
  }
  return e;
}

inline complexd bunching(const AtomEnsemble& e) {
  complexd sum{0, 0};
  for (double th : e.theta) sum += std::exp(complexd(0.0, -th));
  return sum / static_cast<double>(e.size());
}

// Coupling for which the empty-cavity resonant steady state satisfies
// |a_minus|^2 / |a_plus|^2 = target_ratio.
inline double calibrate_backscatter(double target_ratio, double kappa) {
  if (target_ratio < 0 || target_ratio >= 1)
    throw invalid_parameter("backscatter ratio must be in [0, 1)");
  return kappa * std::sqrt(target_ratio);
}

inline std::pair<double, double> powers(const FieldState& f, const ModelParams& m) {
  const double per_photon = m.photon_power();
  return {std::norm(f.a_plus) * per_photon, std::norm(f.a_minus) * per_photon};
}

// Equations of motion.  The atoms see the dipole force of the interference
// lattice between the counter-propagating modes; each mode acquires the
// collective dispersive shift and is cross-coupled through the density
// grating and mirror backscattering.  Sign conventions are pinned by the
// zero-loss invariants |a+|^2 + |a-|^2 and w*sum(u) + (|a+|^2 - |a-|^2).
struct Derivative {
  std::vector<double> dtheta;
  std::vector<double> du;
  complexd da_plus;
  complexd da_minus;
};

inline void rhs_into(const SimState& s, const ModelParams& m, const PumpProfile& pump,
                     Derivative& d) {
  const int n = s.ensemble.size();
  d.dtheta.resize(n);
  d.du.resize(n);

  const complexd a = s.fields.a_plus;
  const complexd b = s.fields.a_minus;
  const complexd ab = a * std::conj(b);

  complexd grating{0, 0};  // sum_j exp(+i theta_j), fixed-order reduction
  for (int j = 0; j < n; ++j) {
    const double th = s.ensemble.theta[j];
    const complexd phase(std::cos(th), std::sin(th));
    grating += phase;
    d.dtheta[j] = m.omega_r * s.ensemble.u[j];
    d.du[j] = 4.0 * m.u0 * std::imag(ab * phase);
  }

  const complexd i_unit(0.0, 1.0);
  const double w = s.ensemble.weight;
  const complexd shift = i_unit * (m.delta_c - m.u0 * w * n);
  const double eta = pump_eval(pump, s.t);

  d.da_plus = (shift - m.kappa) * a - i_unit * m.u0 * w * std::conj(grating) * b -
              i_unit * std::conj(m.beta) * b + eta;
  d.da_minus = (shift - m.kappa) * b - i_unit * m.u0 * w * grating * a -
               i_unit * m.beta * a;
}

inline Derivative rhs(const SimState& s, const ModelParams& m, const PumpProfile& pump) {
  Derivative d;
  rhs_into(s, m, pump, d);
  return d;
}

// Time series of the observables plotted in the experiment.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> p_plus;   // W
  std::vector<double> p_minus;  // W
  std::vector<complexd> b;      // bunching
  std::vector<double> mean_u;
  std::vector<double> std_u;
  SimState final_state;
  bool failed = false;     // integration aborted; series holds the partial run
  double failure_time = 0;
};

namespace detail {

// Flat state layout: [theta..., u..., Re a+, Im a+, Re a-, Im a-].
inline void pack(const SimState& s, std::vector<double>& y) {
  const int n = s.ensemble.size();
  y.resize(2 * n + 4);
  std::copy(s.ensemble.theta.begin(), s.ensemble.theta.end(), y.begin());
  std::copy(s.ensemble.u.begin(), s.ensemble.u.end(), y.begin() + n);
  y[2 * n + 0] = s.fields.a_plus.real();
  y[2 * n + 1] = s.fields.a_plus.imag();
  y[2 * n + 2] = s.fields.a_minus.real();
  y[2 * n + 3] = s.fields.a_minus.imag();
}

inline void unpack(const std::vector<double>& y, SimState& s) {
  const int n = s.ensemble.size();
  std::copy(y.begin(), y.begin() + n, s.ensemble.theta.begin());
  std::copy(y.begin() + n, y.begin() + 2 * n, s.ensemble.u.begin());
  s.fields.a_plus = {y[2 * n + 0], y[2 * n + 1]};
  s.fields.a_minus = {y[2 * n + 2], y[2 * n + 3]};
}

class FlatRhs {
 public:
  FlatRhs(const ModelParams& m, const PumpProfile& pump, int n, double weight)
      : m_(m), pump_(pump) {
    scratch_.ensemble.theta.resize(n);
    scratch_.ensemble.u.resize(n);
    scratch_.ensemble.weight = weight;
  }

  void operator()(double t, const std::vector<double>& y, std::vector<double>& dydt) {
    const int n = scratch_.ensemble.size();
    scratch_.t = t;
    unpack(y, scratch_);
    rhs_into(scratch_, m_, pump_, deriv_);
    dydt.resize(2 * n + 4);
    std::copy(deriv_.dtheta.begin(), deriv_.dtheta.end(), dydt.begin());
    std::copy(deriv_.du.begin(), deriv_.du.end(), dydt.begin() + n);
    dydt[2 * n + 0] = deriv_.da_plus.real();
    dydt[2 * n + 1] = deriv_.da_plus.imag();
    dydt[2 * n + 2] = deriv_.da_minus.real();
    dydt[2 * n + 3] = deriv_.da_minus.imag();
  }

 private:
  const ModelParams& m_;
  const PumpProfile& pump_;
  SimState scratch_;
  Derivative deriv_;
};

// Dormand-Prince 5(4) embedded pair.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

struct IntegrateOptions {
  double tol = 1e-8;        // relative local error per step
  double sample_dt = 2e-7;  // s
  double h_min = 1e-12;     // s, step-size floor
  double h_init = 0.0;      // 0 = automatic
};

// Adaptive DOPRI5 integration with samples at fixed intervals.  Steps are
// clipped to the sample grid, so sampled values need no dense output.
inline Trajectory integrate(const SimState& init, const ModelParams& m,
                            const PumpProfile& pump, double t_end,
                            const IntegrateOptions& opt = {}) {
  if (t_end < init.t) throw invalid_parameter("t_end must not precede the initial time");
  if (opt.tol < 1e-12 || opt.tol > 1e-3)
    throw invalid_parameter("tolerance must lie in [1e-12, 1e-3]");

  const int n = init.ensemble.size();
  const int dim = 2 * n + 4;
  detail::FlatRhs f(m, pump, n, init.ensemble.weight);

  std::vector<double> y(dim), ynew(dim), yerr(dim);
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim),
      ytmp(dim);
  detail::pack(init, y);

  SimState state = init;
  Trajectory traj;
  auto record = [&](double t) {
    state.t = t;
    detail::unpack(y, state);
    auto [pp, pm] = powers(state.fields, m);
    traj.t.push_back(t);
    traj.p_plus.push_back(pp);
    traj.p_minus.push_back(pm);
    traj.b.push_back(bunching(state.ensemble));
    double mean = 0, sq = 0;
    for (double u : state.ensemble.u) mean += u;
    mean /= n;
    for (double u : state.ensemble.u) sq += (u - mean) * (u - mean);
    traj.mean_u.push_back(mean);
    traj.std_u.push_back(std::sqrt(sq / n));
  };

  double t = init.t;
  record(t);
  if (t_end == init.t) {
    traj.final_state = state;
    return traj;
  }

  f(t, y, k1);
  double h = opt.h_init;
  if (h <= 0) {
    // crude first guess from the derivative magnitude
    double ny = 1e-8, nd = 1e-8;
    for (int i = 0; i < dim; ++i) {
      ny = std::max(ny, std::abs(y[i]));
      nd = std::max(nd, std::abs(k1[i]));
    }
    h = std::min(0.01 * ny / nd, (t_end - t) / 10.0);
    h = std::max(h, opt.h_min);
  }

  using D = detail::Dopri5;
  const double atol = 1e-12;
  double next_sample = init.t + opt.sample_dt;
  bool first_same_as_last = true;  // k1 already holds f(t, y)

  while (t < t_end) {
    // Clip to the next sample time so sampled values need no dense output,
    // but remember the controller's step so clipping cannot shrink it.
    const double t_stop = std::min(next_sample, t_end);
    bool clipped = false;
    double h_step = h;
    if (t + h_step >= t_stop) {
      h_step = t_stop - t;
      clipped = true;
    }

    if (!first_same_as_last) f(t, y, k1);

    for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h_step * D::a21 * k1[i];
    f(t + D::c2 * h_step, ytmp, k2);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h_step * (D::a31 * k1[i] + D::a32 * k2[i]);
    f(t + D::c3 * h_step, ytmp, k3);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h_step * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
    f(t + D::c4 * h_step, ytmp, k4);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h_step * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] +
                                 D::a54 * k4[i]);
    f(t + D::c5 * h_step, ytmp, k5);
    for (int i = 0; i < dim; ++i)
      ytmp[i] = y[i] + h_step * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] +
                                 D::a64 * k4[i] + D::a65 * k5[i]);
    f(t + h_step, ytmp, k6);
    for (int i = 0; i < dim; ++i)
      ynew[i] = y[i] + h_step * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] +
                                 D::b5 * k5[i] + D::b6 * k6[i]);
    f(t + h_step, ynew, k7);

    double err = 0;
    for (int i = 0; i < dim; ++i) {
      const double e = h_step * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] +
                                 D::e5 * k5[i] + D::e6 * k6[i] + D::e7 * k7[i]);
      const double scale = atol + opt.tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / scale);
    }

    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      t = clipped ? t_stop : t + h_step;
      std::swap(y, ynew);
      std::swap(k1, k7);
      first_same_as_last = true;
      while (next_sample <= t && next_sample <= t_end) {
        record(next_sample);
        next_sample += opt.sample_dt;
      }
      h = clipped ? std::max(h, h_step * factor) : h_step * factor;
    } else {
      first_same_as_last = false;
      h = h_step * factor;
    }
    if (h < opt.h_min) {
      state.t = t;
      detail::unpack(y, state);
      traj.final_state = state;
      traj.failed = true;
      traj.failure_time = t;
      return traj;
    }
  }

  if (traj.t.empty() || traj.t.back() < t_end - 1e-9 * opt.sample_dt) record(t_end);
  state.t = t_end;
  detail::unpack(y, state);
  traj.final_state = state;
  return traj;
}

}  // namespace carl
