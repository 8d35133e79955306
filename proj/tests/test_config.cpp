#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "carl/config.hpp"

using namespace carl;
using Catch::Approx;

namespace {
const std::string kMinimal =
    "[physical]\n"
    "wavelength = 797.3 nm\n"
    "atom_number = 1.5e6\n"
    "pump_power = 4 W\n"
    "temperature = 2 uK\n";
}

TEST_CASE("minimal config picks up the default table") {
  Config cfg = parse_config(kMinimal);
  const auto& p = cfg.run.physical;
  CHECK(p.wavelength == Approx(797.3e-9));
  CHECK(p.pump_power == Approx(4.0));
  CHECK(p.temperature == Approx(2e-6));
  CHECK(p.d1_wavelength == Approx(794.8e-9));
  CHECK(p.cavity_length == Approx(0.085));
  REQUIRE(p.decay_time.has_value());
  CHECK(*p.decay_time == Approx(3.8e-6));
  CHECK(!p.finesse.has_value());
  CHECK(p.backscatter_ratio == Approx(1.8e-4));
  CHECK(cfg.run.simulation.n_sim == 100);
  CHECK(cfg.run.simulation.tol == Approx(1e-8));
  CHECK(cfg.run.pump.type == PumpConfig::Type::Ramp);
  CHECK(cfg.run.pump.tau_bw == Approx(20e-6));
  CHECK(!cfg.sweep.has_value());
}

TEST_CASE("unit suffixes convert at the boundary") {
  Config cfg = parse_config(kMinimal +
                            "[simulation]\n"
                            "t_end = 150 us\n"
                            "sample_dt = 0.2 us\n"
                            "delta_c = 20 kHz\n");
  CHECK(cfg.run.simulation.t_end == Approx(150e-6));
  CHECK(cfg.run.simulation.sample_dt == Approx(2e-7));
  REQUIRE(cfg.run.simulation.delta_c.has_value());
  CHECK(*cfg.run.simulation.delta_c == Approx(constants::two_pi * 2e4));

  Config mhz = parse_config(
      "[physical]\n"
      "wavelength = 795 nm\n"
      "atomic_linewidth = 6 MHz\n"
      "coupling_g = 84 kHz\n");
  CHECK(mhz.run.physical.atomic_linewidth == Approx(constants::two_pi * 6e6));
  CHECK(*mhz.run.physical.coupling_g_override == Approx(constants::two_pi * 84e3));
}

TEST_CASE("finesse replaces the default decay time") {
  Config cfg = parse_config(kMinimal + "finesse = 6400\n");
  CHECK(!cfg.run.physical.decay_time.has_value());
  REQUIRE(cfg.run.physical.finesse.has_value());
  CHECK(*cfg.run.physical.finesse == Approx(6400.0));

  CHECK_THROWS_AS(parse_config(kMinimal + "finesse = 6400\ndecay_time = 3.8 us\n"),
                  config_error);
}

TEST_CASE("config errors carry the offending line") {
  try {
    parse_config(kMinimal + "frobnicate = 1\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line_number == 6);
    CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
  }

  try {
    parse_config(kMinimal + "wavelength = 795 nm\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line_number == 6);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config("wavelength = 795 nm\n"), config_error);  // no section
  CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "waist = 107 parsec\n"), config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "waist\n"), config_error);
}

TEST_CASE("semantic validation happens after parsing") {
  CHECK_THROWS_AS(parse_config("[physical]\nwavelength = 794.8 nm\n"), config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "[simulation]\ntol = 1\n"), config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "[simulation]\nn_sim = 1\n"), config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "[pump]\ntype = recorded\n"), config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "[pump]\ntype = sawtooth\n"), config_error);
}

TEST_CASE("sweep section") {
  Config cfg = parse_config(kMinimal +
                            "[sweep]\n"
                            "parameter = atom_number\n"
                            "values = 4e5, 8e5, 1.6e6\n"
                            "replicates = 3\n"
                            "seeds = 1, 2, 3\n");
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->parameter == "atom_number");
  CHECK(cfg.sweep->values == std::vector<double>{4e5, 8e5, 1.6e6});
  CHECK(cfg.sweep->seeds == std::vector<std::uint64_t>{1, 2, 3});

  Config log = parse_config(kMinimal +
                            "[sweep]\n"
                            "parameter = pump_power\n"
                            "log_start = 0.2\n"
                            "log_stop = 4\n"
                            "log_points = 6\n");
  REQUIRE(log.sweep.has_value());
  REQUIRE(log.sweep->values.size() == 6);
  CHECK(log.sweep->values.front() == Approx(0.2));
  CHECK(log.sweep->values.back() == Approx(4.0));
  CHECK(log.sweep->values[1] / log.sweep->values[0] ==
        Approx(std::pow(20.0, 0.2)).epsilon(1e-12));

  // master-seed expansion is deterministic and replicate-distinct
  auto seeds = log.sweep->resolved_seeds(99);
  CHECK(seeds.size() == 3);
  CHECK(seeds == log.sweep->resolved_seeds(99));
  CHECK(seeds[0] != seeds[1]);

  CHECK_THROWS_AS(parse_config(kMinimal + "[sweep]\nparameter = waist\nvalues = 1, 2, 3\n"),
                  config_error);
  CHECK_THROWS_AS(parse_config(kMinimal + "[sweep]\nparameter = atom_number\n"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config(kMinimal +
                   "[sweep]\nparameter = atom_number\nvalues = 1e6\nseeds = 1, 2\n"
                   "replicates = 3\n"),
      config_error);
}

TEST_CASE("parse after serialize is the identity") {
  Config cfg = parse_config(kMinimal +
                            "finesse = 6400\n"
                            "backscatter_phase = 0.7\n"
                            "[simulation]\n"
                            "n_sim = 200\n"
                            "t_end = 80 us\n"
                            "seed = 17\n"
                            "quiet_start = false\n"
                            "[pump]\n"
                            "tau_bw = 1 us\n"
                            "[sweep]\n"
                            "parameter = temperature\n"
                            "values = 2 uK, 5 uK, 10 uK\n"
                            "replicates = 2\n"
                            "seeds = 5, 6\n");
  Config back = parse_config(serialize_config(cfg));
  CHECK(back.run.physical.wavelength == cfg.run.physical.wavelength);
  CHECK(back.run.physical.finesse == cfg.run.physical.finesse);
  CHECK(back.run.physical.backscatter_phase == cfg.run.physical.backscatter_phase);
  CHECK(back.run.physical.coupling_g_override == cfg.run.physical.coupling_g_override);
  CHECK(back.run.simulation.n_sim == cfg.run.simulation.n_sim);
  CHECK(back.run.simulation.t_end == cfg.run.simulation.t_end);
  CHECK(back.run.simulation.seed == cfg.run.simulation.seed);
  CHECK(back.run.simulation.quiet_start == cfg.run.simulation.quiet_start);
  CHECK(back.run.pump.tau_bw == cfg.run.pump.tau_bw);
  REQUIRE(back.sweep.has_value());
  CHECK(back.sweep->parameter == cfg.sweep->parameter);
  CHECK(back.sweep->values == cfg.sweep->values);
  CHECK(back.sweep->seeds == cfg.sweep->seeds);
  // fixed point: serializing again reproduces the same text
  CHECK(serialize_config(back) == serialize_config(cfg));
}

TEST_CASE("quiet start resolution") {
  Config cfg = parse_config(kMinimal);
  CHECK(!cfg.run.quiet_start_resolved());  // T > 0
  Config cold = parse_config(
      "[physical]\nwavelength = 795 nm\ntemperature = 0\n");
  CHECK(cold.run.quiet_start_resolved());
  Config forced = parse_config(kMinimal + "[simulation]\nquiet_start = true\n");
  CHECK(forced.run.quiet_start_resolved());
}
