// Acceptance gate: one PASS/FAIL line per criterion, exit nonzero on any
// failure.  Runs the shipped reproduction configs end to end.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "carl/analysis.hpp"
#include "carl/config.hpp"
#include "carl/dynamics.hpp"
#include "carl/params.hpp"
#include "carl/simulate.hpp"
#include "carl/sweep.hpp"

using namespace carl;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("criterion %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
              what.c_str());
  if (!pass) ++failures;
}

Config load(const std::string& name) {
  const std::string path = std::string(CARL_CONFIG_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw config_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// --- criterion 1: derived constants ---------------------------------------
void criterion_1() {
  const double kappa = kappa_from_decay(3.8e-6);
  const bool exact = std::abs(kappa * 2.0 * 3.8e-6 - 1.0) < 1e-12;
  const bool quoted = std::abs(kappa - 1.316e5) / 1.316e5 < 5e-3;
  PhysicalParams p;
  p.wavelength = 795e-9;
  const ModelParams m = derive(p);
  const double wr_ref = constants::two_pi * 14e3;
  const bool recoil = std::abs(m.omega_r - wr_ref) / wr_ref < 0.05;
  report(1, exact && quoted && recoil,
         "kappa = " + fmt(kappa) + " rad/s, omega_r = " + fmt(m.omega_r) + " rad/s");
}

// --- criterion 2: zero-loss conservation ----------------------------------
void criterion_2() {
  PhysicalParams p;
  p.wavelength = 797.3e-9;
  p.atom_number = 1.5e6;
  p.pump_power = 4.0;
  p.temperature = 0.0;
  ModelParams m = derive(p);
  m.kappa = 0;
  m.eta = 0;
  m.beta = 0;
  m.delta_c = 0;
  m.u0 = 1e4;

  SimState s;
  s.ensemble = sample_ensemble(100, 0.0, m, 5, false);
  s.ensemble.weight = 1.0;
  s.fields.a_plus = {3.0, 0.0};
  s.fields.a_minus = {0.5, -0.25};

  auto invariants = [&](const SimState& q) {
    const double np = std::norm(q.fields.a_plus), nm = std::norm(q.fields.a_minus);
    double su = 0;
    for (double u : q.ensemble.u) su += u;
    return std::pair<double, double>{np + nm, q.ensemble.weight * su + (np - nm)};
  };

  PumpProfile pump = PumpProfile::ramp(0.0, 1e-6);
  IntegrateOptions opt;
  opt.tol = 1e-9;
  const double t_end = 10.0 / m.omega_r;
  opt.sample_dt = t_end / 20.0;
  Trajectory traj = integrate(s, m, pump, t_end, opt);
  const auto [n0, p0] = invariants(s);
  const auto [n1, p1] = invariants(traj.final_state);
  const double drift_n = std::abs(n1 - n0) / std::abs(n0);
  const double drift_p = std::abs(p1 - p0) / (std::abs(n0) + std::abs(p0));
  report(2, !traj.failed && drift_n < 1e-6 && drift_p < 1e-6,
         "photon drift " + fmt(drift_n) + ", momentum drift " + fmt(drift_p));
}

// --- criterion 3: burst phenomenology -------------------------------------
void criterion_3() {
  Config cfg = load("burst.ini");
  RunResult r = run_simulation(cfg.run);
  const bool delayed = std::isfinite(r.metrics.delay) && r.metrics.delay > 1e-6 &&
                       r.metrics.first_peak_time > r.metrics.delay;
  const double ratio =
      r.metrics.has_burst ? r.metrics.first_peak_height / r.metrics.first_peak_pump : 0;
  const bool height_ok = ratio >= 1e-3 && ratio <= 1e-2;
  const bool revivals_ok = r.metrics.revival_count >= 2;
  const bool rise_ok =
      std::isfinite(r.rise_time) && r.rise_time >= 0.3e-6 && r.rise_time <= 3e-6;
  report(3, !r.trajectory.failed && delayed && height_ok && revivals_ok && rise_ok,
         "peak/pump " + fmt(ratio) + ", revivals " +
             std::to_string(r.metrics.revival_count) + ", rise " +
             fmt(r.rise_time * 1e6) + " us, delay " + fmt(r.metrics.delay * 1e6) + " us");
}

// --- criterion 4: scaling exponents ---------------------------------------
void sweep_criterion(const std::string& config, double target, double tol,
                     std::string* what, bool* ok) {
  Config cfg = load(config);
  SweepResult r = run_sweep(cfg.run, *cfg.sweep, 4);
  const bool pass = r.fit_valid && std::abs(r.fit.exponent - target) <= tol;
  *ok = *ok && pass;
  if (!what->empty()) *what += ", ";
  *what += config.substr(6, config.size() - 10) + " " +
           (r.fit_valid ? fmt(r.fit.exponent) : std::string("no-fit"));
}

void criterion_4() {
  bool ok = true;
  std::string what;
  sweep_criterion("sweep_gc_atom_number.ini", 4.0 / 3.0, 0.15, &what, &ok);
  sweep_criterion("sweep_sr_atom_number.ini", 2.0, 0.2, &what, &ok);
  sweep_criterion("sweep_gc_pump_power.ini", 1.0 / 3.0, 0.1, &what, &ok);
  sweep_criterion("sweep_sr_pump_power.ini", 1.0, 0.15, &what, &ok);
  report(4, ok, what);
}

// --- criterion 5: temperature suppression ---------------------------------
void criterion_5() {
  Config cfg = load("sweep_temperature.ini");
  SweepResult r = run_sweep(cfg.run, *cfg.sweep, 4);
  bool monotone = true;
  for (std::size_t i = 1; i < r.points.size(); ++i)
    if (r.points[i].mean_peak_height > r.points[i - 1].mean_peak_height)
      monotone = false;
  bool revivals_ok = true;
  for (const auto& pt : r.points)
    if (pt.value >= 20e-6 && pt.mean_revival_count > 1.0) revivals_ok = false;

  // hottest trace stays within a factor 3 of the backscatter floor
  RunConfig hot = cfg.run;
  hot.physical.temperature = 40e-6;
  RunResult run = run_simulation(hot);
  double worst = 0;
  for (std::size_t i = 0; i < run.trajectory.t.size(); ++i) {
    const double base = hot.physical.backscatter_ratio * run.trajectory.p_plus[i];
    if (base > 0) worst = std::max(worst, run.trajectory.p_minus[i] / base);
  }
  std::string what = "heights";
  for (const auto& pt : r.points) what += " " + fmt(pt.mean_peak_height);
  what += ", 40uK max/floor " + fmt(worst);
  report(5, monotone && revivals_ok && worst < 3.0, what);
}

// --- criterion 6: backscatter calibration ---------------------------------
void criterion_6() {
  PhysicalParams p;
  p.wavelength = 797.3e-9;
  p.atom_number = 1.5e6;
  p.pump_power = 4.0;
  ModelParams m = derive(p);
  m.u0 = 0;
  m.delta_c = 0;
  SimState s;
  s.ensemble = sample_ensemble(2, 0.0, m, 1, true);
  PumpProfile pump = PumpProfile::recorded({{0.0, m.eta}});
  IntegrateOptions opt;
  opt.sample_dt = 5e-6;
  Trajectory traj = integrate(s, m, pump, 10.0 / m.kappa, opt);
  const double ratio = traj.p_minus.back() / traj.p_plus.back();
  report(6, std::abs(ratio - 1.8e-4) / 1.8e-4 < 0.01,
         "steady P-/P+ = " + fmt(ratio));
}

// --- criterion 7: dispersion oracle equivalence ---------------------------
void criterion_7() {
  PhysicalParams p;
  p.wavelength = 796.1e-9;
  p.atom_number = 2.4e6;
  p.pump_power = 0.5;
  p.temperature = 0.0;
  ModelParams m = derive(p);

  // (i) eigenvalues of the numerical Jacobian at the unbunched state
  ModelParams mj = m;
  mj.beta = 0;
  const int n = 100;
  SimState s;
  s.ensemble = sample_ensemble(n, 0.0, mj, 1, true);
  s.fields.a_plus = {std::sqrt(mj.n_target), 0.0};
  PumpProfile pump = PumpProfile::recorded({{0.0, mj.eta}});
  const int dim = 2 * n + 4;
  auto flat_rhs = [&](const std::vector<double>& y) {
    SimState q = s;
    for (int j = 0; j < n; ++j) {
      q.ensemble.theta[j] = y[j];
      q.ensemble.u[j] = y[n + j];
    }
    q.fields.a_plus = {y[2 * n], y[2 * n + 1]};
    q.fields.a_minus = {y[2 * n + 2], y[2 * n + 3]};
    Derivative d = rhs(q, mj, pump);
    std::vector<double> f(dim);
    for (int j = 0; j < n; ++j) {
      f[j] = d.dtheta[j];
      f[n + j] = d.du[j];
    }
    f[2 * n] = d.da_plus.real();
    f[2 * n + 1] = d.da_plus.imag();
    f[2 * n + 2] = d.da_minus.real();
    f[2 * n + 3] = d.da_minus.imag();
    return f;
  };
  std::vector<double> y0(dim, 0.0);
  for (int j = 0; j < n; ++j) y0[j] = s.ensemble.theta[j];
  y0[2 * n] = s.fields.a_plus.real();
  Eigen::MatrixXd jac(dim, dim);
  for (int c = 0; c < dim; ++c) {
    const double h = 1e-6 * std::max(1.0, std::abs(y0[c]));
    std::vector<double> yp = y0, ym = y0;
    yp[c] += h;
    ym[c] -= h;
    const auto fp = flat_rhs(yp), fm = flat_rhs(ym);
    for (int r = 0; r < dim; ++r) jac(r, c) = (fp[r] - fm[r]) / (2.0 * h);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  double max_re = -1e300;
  for (int i = 0; i < dim; ++i)
    max_re = std::max(max_re, solver.eigenvalues()[i].real());
  const double disp0 = linear_dispersion(m, {0.0}).rate[0];
  const bool jac_ok = std::abs(disp0 - max_re) / std::abs(max_re) < 1e-6;

  // (ii) growth-rate fit on the nonlinear run's linear phase
  SimState s2;
  s2.ensemble = sample_ensemble(100, 0.0, m, 1, true);
  s2.fields.a_plus = {std::sqrt(m.n_target), 0.0};
  IntegrateOptions opt;
  opt.tol = 1e-9;
  opt.sample_dt = 1e-7;
  Trajectory traj = integrate(s2, m, PumpProfile::recorded({{0.0, m.eta}}), 30e-6, opt);
  int peak = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    if (traj.p_minus[i] > traj.p_minus[peak]) peak = static_cast<int>(i);
  int lo = 0, hi = 0;
  for (int i = 0; i < peak; ++i) {
    if (traj.p_minus[i] < 1e-3 * traj.p_minus[peak]) lo = i;
    if (traj.p_minus[i] < 2e-2 * traj.p_minus[peak]) hi = i;
  }
  bool fit_ok = false;
  double rate = 0;
  if (lo > 0 && hi > lo) {
    rate = fit_growth_rate(traj, traj.t[lo], traj.t[hi]).rate;
    fit_ok = std::abs(rate - disp0) / disp0 < 0.05;
  }
  report(7, jac_ok && fit_ok,
         "dispersion " + fmt(disp0) + ", jacobian " + fmt(max_re) + ", sim fit " +
             fmt(rate));
}

// --- criterion 8: gain range ----------------------------------------------
void criterion_8() {
  double lo = 1e300, hi = 0;
  for (double lam : {795.3e-9, 796.1e-9, 797.3e-9}) {
    for (double power : {0.03, 0.5, 4.0}) {
      for (double atoms : {3e5, 2.4e6, 7e6}) {
        for (int fin = 0; fin < 2; ++fin) {
          PhysicalParams p;
          p.wavelength = lam;
          p.pump_power = power;
          p.atom_number = atoms;
          if (fin) {
            p.decay_time.reset();
            p.finesse = 6400.0;
          }
          const ModelParams m = derive(p);
          const double g = carl_gain(m.n_target, m.atom_number, std::abs(m.u0), m.kappa);
          lo = std::min(lo, g);
          hi = std::max(hi, g);
        }
      }
    }
  }
  report(8, lo <= 1e4 && hi >= 1e8,
         "gain spans [" + fmt(lo) + ", " + fmt(hi) + "] /s");
}

// --- criterion 9: regime classification -----------------------------------
void criterion_9() {
  auto classify = [](const std::string& config) {
    Config cfg = load(config);
    const ModelParams m = derive(cfg.run.physical);
    const DispersionResult d = linear_dispersion(m, dispersion_grid(m));
    return std::pair<Regime, double>{
        classify_regime(d.gain_bandwidth, m.kappa, m.omega_r),
        d.gain_bandwidth / m.kappa};
  };
  const auto [gc, gc_bw] = classify("classify_goodcavity.ini");
  const auto [sr, sr_bw] = classify("classify_superradiant.ini");
  report(9, gc == Regime::GoodCavity && sr == Regime::Superradiant,
         "good-cavity bw/kappa " + fmt(gc_bw) + " -> " + regime_name(gc) +
             ", superradiant bw/kappa " + fmt(sr_bw) + " -> " + regime_name(sr));
}

}  // namespace

int main() {
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << "\n";
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
