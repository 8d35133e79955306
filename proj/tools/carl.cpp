#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "carl/analysis.hpp"
#include "carl/config.hpp"
#include "carl/io.hpp"
#include "carl/params.hpp"
#include "carl/simulate.hpp"
#include "carl/sweep.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitIntegrationFailure = 3;
constexpr int kExitSweepFailure = 4;

carl::Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw carl::config_error("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return carl::parse_config(text.str());
}

std::string out_path(const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) return file;
  std::filesystem::create_directories(out_dir);
  return (std::filesystem::path(out_dir) / file).string();
}

std::string us(double seconds) { return carl::format_double(seconds * 1e6); }

int cmd_simulate(const carl::Config& cfg, const std::string& out_dir) {
  carl::RunResult r = carl::run_simulation(cfg.run);
  carl::write_trajectory_csv(out_path(out_dir, cfg.run.output.trajectory), r.trajectory);

  const auto& m = r.model;
  const double gain =
      carl::carl_gain(m.n_target, m.atom_number, std::abs(m.u0), m.kappa);
  const auto disp = carl::linear_dispersion(m, carl::dispersion_grid(m));
  std::vector<std::pair<std::string, std::string>> kv = {
      {"has_burst", r.metrics.has_burst ? "true" : "false"},
      {"first_peak_height_W", carl::format_double(r.metrics.first_peak_height)},
      {"first_peak_time_us", us(r.metrics.first_peak_time)},
      {"first_peak_pump_W", carl::format_double(r.metrics.first_peak_pump)},
      {"delay_us", us(r.metrics.delay)},
      {"rise_time_us", us(r.rise_time)},
      {"revival_count", std::to_string(r.metrics.revival_count)},
      {"gain_per_s", carl::format_double(gain)},
      {"gain_bandwidth_rad_per_s", carl::format_double(disp.gain_bandwidth)},
      {"regime", disp.no_gain
                     ? "no-gain"
                     : carl::regime_name(carl::classify_regime(disp.gain_bandwidth,
                                                               m.kappa, m.omega_r))},
  };
  carl::write_key_values(out_path(out_dir, cfg.run.output.metrics), kv);

  if (r.trajectory.failed) {
    std::cerr << "integration failed at t = " << us(r.trajectory.failure_time)
              << " us\n";
    return kExitIntegrationFailure;
  }
  return 0;
}

int cmd_sweep(const carl::Config& cfg, const std::string& out_dir, int threads) {
  if (!cfg.sweep) throw carl::config_error("config has no [sweep] section");
  carl::SweepResult r = carl::run_sweep(cfg.run, *cfg.sweep, threads);
  carl::write_sweep_csv(out_path(out_dir, cfg.run.output.sweep), r);
  int failed_points = 0;
  for (const auto& pt : r.points)
    if (pt.failed) ++failed_points;
  if (2 * failed_points > static_cast<int>(r.points.size())) {
    std::cerr << failed_points << " of " << r.points.size() << " sweep points failed\n";
    return kExitSweepFailure;
  }
  if (r.fit_valid)
    std::cout << "exponent = " << carl::format_double(r.fit.exponent)
              << " +/- " << carl::format_double(r.fit.exponent_stderr) << "\n";
  return 0;
}

int cmd_classify(const carl::Config& cfg) {
  const carl::ModelParams m =
      carl::derive(cfg.run.physical, cfg.run.simulation.n_sim, cfg.run.pump.tau_bw,
                   cfg.run.simulation.delta_c);
  const auto disp = carl::linear_dispersion(m, carl::dispersion_grid(m));
  const double gain =
      carl::carl_gain(m.n_target, m.atom_number, std::abs(m.u0), m.kappa);
  auto line = [](const std::string& k, const std::string& v) {
    std::cout << k << " = " << v << "\n";
  };
  line("kappa_rad_per_s", carl::format_double(m.kappa));
  line("omega_r_rad_per_s", carl::format_double(m.omega_r));
  line("u0_rad_per_s", carl::format_double(m.u0));
  line("g_rad_per_s", carl::format_double(m.g));
  line("delta_a_rad_per_s", carl::format_double(m.delta_a));
  line("sigma_v_rad_per_s", carl::format_double(m.sigma_v));
  line("n_target", carl::format_double(m.n_target));
  line("eta_rad_per_s", carl::format_double(m.eta));
  line("delta_c_rad_per_s", carl::format_double(m.delta_c));
  line("gain_per_s", carl::format_double(gain));
  line("peak_growth_rate_per_s", carl::format_double(disp.peak_rate));
  line("gain_bandwidth_rad_per_s", carl::format_double(disp.gain_bandwidth));
  if (disp.no_gain)
    line("regime", "no-gain");
  else
    line("regime",
         carl::regime_name(carl::classify_regime(disp.gain_bandwidth, m.kappa, m.omega_r)));
  return 0;
}

int cmd_calibrate(const carl::Config& cfg) {
  const carl::ModelParams m =
      carl::derive(cfg.run.physical, cfg.run.simulation.n_sim, cfg.run.pump.tau_bw,
                   cfg.run.simulation.delta_c);
  const double beta =
      carl::calibrate_backscatter(cfg.run.physical.backscatter_ratio, m.kappa);
  std::cout << "beta_rad_per_s = " << carl::format_double(beta) << "\n";
  std::cout << "beta_over_kappa = " << carl::format_double(beta / m.kappa) << "\n";
  std::cout << "steady_state_ratio = "
            << carl::format_double(cfg.run.physical.backscatter_ratio) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical ring-cavity CARL simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--seed", seed, "override the simulation seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "sweep worker threads (0 = auto)");

  auto* sub_simulate = app.add_subcommand("simulate", "run a single trajectory");
  auto* sub_sweep = app.add_subcommand("sweep", "run a parameter sweep");
  auto* sub_classify = app.add_subcommand("classify", "report derived rates and regime");
  auto* sub_calibrate =
      app.add_subcommand("calibrate-backscatter", "report the mirror coupling");

  CLI11_PARSE(app, argc, argv);

  try {
    carl::Config cfg = load_config(config_path);
    if (seed) cfg.run.simulation.seed = *seed;
    if (sub_simulate->parsed()) return cmd_simulate(cfg, out_dir);
    if (sub_sweep->parsed()) return cmd_sweep(cfg, out_dir, threads);
    if (sub_classify->parsed()) return cmd_classify(cfg);
    if (sub_calibrate->parsed()) return cmd_calibrate(cfg);
  } catch (const carl::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const carl::invalid_parameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const carl::integration_error& e) {
    std::cerr << "integration error: " << e.what() << "\n";
    return kExitIntegrationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
