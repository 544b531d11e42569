#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ringcool/config.hpp"
#include "ringcool/scenario.hpp"

using namespace ringcool;

TEST_CASE("resonance solvers") {
  SUBCASE("atom number for the rubidium design point") {
    const double omega_v = 2.0 * si::pi * 380.2e3;
    const long long n = solve_resonant_atom_number(omega_v, -1.0, 0.9);
    CHECK(std::abs(double(n) - 1.33e6) / 1.33e6 < 0.05);
  }
  SUBCASE("single-atom corner case") {
    CHECK(solve_resonant_atom_number(1.8, -1.0, 0.9) == 1);
  }
  SUBCASE("solver inverses round trip") {
    const double omega_v = 2.0 * si::pi * 380.2e3, d0 = -1.0, g = 0.9;
    const double n = double(solve_resonant_atom_number(omega_v, d0, g));
    CHECK(solve_resonant_g_mod(2.0 * n * std::abs(d0) * g, d0, n) ==
          doctest::Approx(g).epsilon(1e-14));
    CHECK(solve_resonant_lightshift(2.0 * n * std::abs(d0) * g, n, g) ==
          doctest::Approx(d0).epsilon(1e-14));
    CHECK(solve_resonant_omega_v(d0, n, g) ==
          doctest::Approx(2.0 * n * std::abs(d0) * g).epsilon(1e-14));
  }
  CHECK_THROWS_AS(solve_resonant_atom_number(1.0, 1.0, 0.9), std::domain_error);
  CHECK_THROWS_AS(solve_resonant_atom_number(1.0, -1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(solve_resonant_g_mod(1e9, -1.0, 10.0), std::domain_error);
}

TEST_CASE("rubidium preset reproduces the design point") {
  const RunRecord rec = run_scenario(rb87_paper_preset());

  CHECK(std::abs(rec.get("eta_c") - 0.6) / 0.6 < 0.1);
  CHECK(rec.get("eta_c") == doctest::Approx(0.627).epsilon(0.01));
  CHECK(rec.get("omega_V") == doctest::Approx(2.0 * si::pi * 380.2e3).epsilon(0.01));
  CHECK(std::abs(rec.get("gamma_tilde") - 8e3) / 8e3 < 0.1);
  CHECK(rec.get("xi") == doctest::Approx(1.25e-4).epsilon(0.01));
  CHECK(std::abs(rec.get("atom_number") - 1.33e6) / 1.33e6 < 0.05);

  CHECK(rec.get("mean_n") > 0.63);
  CHECK(rec.get("mean_n") < 0.68);
  CHECK(rec.get("temperature_report") > 11e-6);
  CHECK(rec.get("temperature_report") < 13e-6);
  CHECK(rec.get("cooling_rate") > 85.0);
  CHECK(rec.get("cooling_rate") < 110.0);
  CHECK(rec.get("time_1e") == doctest::Approx(1.0 / rec.get("cooling_rate")).epsilon(1e-14));

  // internal consistency across modules
  CHECK(rec.get("omega_star") == doctest::Approx(rec.get("omega_V")).epsilon(1e-6));
  CHECK(rec.get("delta_c_star") ==
        doctest::Approx(rec.get("atom_number") * rec.get("lightshift_per_photon") * 1.9)
            .epsilon(1e-12));
  CHECK(rec.get("crosscheck_residual") < 1e-6);
  CHECK(rec.get("temperature_steady") ==
        doctest::Approx(0.5 * rec.get("temperature_report")).epsilon(1e-12));
  CHECK(rec.warnings.empty());
}

TEST_CASE("scenario validation and determinism") {
  SUBCASE("g_mod = 0 with a fixed atom number is rejected") {
    Scenario s = rb87_paper_preset();
    s.g_mod = 0.0;
    CHECK_THROWS_AS(run_scenario(s), std::domain_error);
  }
  SUBCASE("non-free atom number below 1 is rejected") {
    Scenario s = rb87_paper_preset();
    s.free_var = Scenario::Free::GMod;
    s.species.atom_number = 0.0;
    CHECK_THROWS_AS(run_scenario(s), std::domain_error);
  }
  SUBCASE("whitespace in the label is a config error") {
    Scenario s = rb87_paper_preset();
    s.label = "bad label";
    CHECK_THROWS_AS(run_scenario(s), ConfigError);
  }
  SUBCASE("records are identical up to the timestamp") {
    RunRecord a = run_scenario(rb87_paper_preset());
    RunRecord b = run_scenario(rb87_paper_preset());
    a.timestamp = b.timestamp = "";
    CHECK(a.serialize() == b.serialize());
  }
  SUBCASE("every free variable closes the resonance condition") {
    const RunRecord base = run_scenario(rb87_paper_preset());
    for (auto free_var : {Scenario::Free::GMod, Scenario::Free::Lightshift,
                          Scenario::Free::OmegaV}) {
      Scenario s = rb87_paper_preset();
      s.free_var = free_var;
      s.species.atom_number = base.get("atom_number");
      const RunRecord rec = run_scenario(s);
      CHECK(rec.get("omega_star") == doctest::Approx(rec.get("omega_V")).epsilon(1e-9));
    }
  }
}

TEST_CASE("run record serialization round trip") {
  RunRecord rec;
  rec.label = "trip";
  rec.timestamp = "2026-01-02T03:04:05Z";
  rec.seed = 42;
  rec.add("x", 0.1 + 0.2, "m");            // not exactly representable
  rec.add("rate", -92.3456789012345678, "1/s");
  rec.add("count", 1.33e6, "1");

  const RunRecord back = RunRecord::parse(rec.serialize());
  CHECK(back.label == "trip");
  CHECK(back.timestamp == "2026-01-02T03:04:05Z");
  CHECK(back.seed == 42);
  CHECK(back.fields.size() == 3);
  for (std::size_t i = 0; i < rec.fields.size(); ++i) {
    CHECK(back.fields[i].first == rec.fields[i].first);
    CHECK(back.fields[i].second.first == rec.fields[i].second.first);  // bit-exact
    CHECK(back.fields[i].second.second == rec.fields[i].second.second);
  }
  CHECK_THROWS_AS(rec.get("missing"), ConfigError);
  CHECK_THROWS_AS(RunRecord::parse("label:a x:1"), ConfigError);
}

TEST_CASE("sweeps") {
  const Scenario base = rb87_paper_preset();

  SUBCASE("a single-value sweep reproduces the scenario record") {
    const RunRecord rec = run_scenario(base);
    const auto table = sweep(base, "ensemble.g_mod", {0.9}, {"mean_n", "cooling_rate"});
    CHECK(table.results(0, 0) == rec.get("mean_n"));
    CHECK(table.results(0, 1) == rec.get("cooling_rate"));
  }

  SUBCASE("row order follows the value list and survives threading") {
    const std::vector<double> values = {0.5, 0.9, 0.3, 0.7};
    const auto serial = sweep(base, "ensemble.g_mod", values, {"atom_number", "omega_star"});
    const auto threaded =
        sweep(base, "ensemble.g_mod", values, {"atom_number", "omega_star"}, 8);
    CHECK((serial.results - threaded.results).cwiseAbs().maxCoeff() == 0.0);
    // permuting the input permutes the rows identically
    const auto permuted =
        sweep(base, "ensemble.g_mod", {0.9, 0.5, 0.7, 0.3}, {"atom_number", "omega_star"});
    CHECK(permuted.results(0, 0) == serial.results(1, 0));
    CHECK(permuted.results(1, 0) == serial.results(0, 0));
  }

  SUBCASE("solved atom number scales as 1/g at fixed trap depth") {
    const auto table = sweep(base, "ensemble.g_mod", {0.3, 0.6, 0.9}, {"atom_number"});
    CHECK(table.results(0, 0) == doctest::Approx(3.0 * table.results(2, 0)).epsilon(1e-3));
    CHECK(table.results(1, 0) == doctest::Approx(1.5 * table.results(2, 0)).epsilon(1e-3));
  }

  SUBCASE("probe sweep peaks at the trap frequency") {
    const RunRecord rec = run_scenario(base);
    const double omega_v = rec.get("omega_V");
    std::vector<double> probes;
    for (int i = 1; i <= 21; ++i) probes.push_back(omega_v * i / 11.0);
    const auto table = sweep(base, "probe.omega", probes, {"lorentzian_rate"});
    Eigen::Index argmax = 0;
    table.results.col(0).maxCoeff(&argmax);
    CHECK(probes[static_cast<std::size_t>(argmax)] == doctest::Approx(omega_v).epsilon(1e-12));
  }

  SUBCASE("unknown axis and metric name the valid choices") {
    try {
      sweep(base, "species.bogus", {1.0}, {"mean_n"});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("ensemble.g_mod") != std::string::npos);
    }
    CHECK_THROWS_AS(sweep(base, "ensemble.g_mod", {0.9}, {"bogus"}), ConfigError);
    CHECK_THROWS_AS(sweep(base, "ensemble.g_mod", {}, {"mean_n"}), ConfigError);
  }

  SUBCASE("CSV export quotes and orders correctly") {
    SweepTable t;
    t.axis = "a,b";
    t.metrics = {"m"};
    t.values = {1.0, 2.0};
    t.results.resize(2, 1);
    t.results << 0.5, 0.25;
    std::ostringstream out;
    write_csv(t, out);
    CHECK(out.str() == "\"a,b\",m\n1,0.5\n2,0.25\n");
  }
}

namespace {

nlohmann::json minimal_config() {
  return nlohmann::json{
      {"label", "cfg-test"},
      {"cavity",
       {{"finesse", {{"value", 1.8e5}, {"unit", "1"}}},
        {"waist", {{"value", 130e-6}, {"unit", "m"}}},
        {"roundtrip_length", {{"value", 0.1}, {"unit", "m"}}},
        {"gamma_c", {{"value", si::pi * 1.7e4}, {"unit", "rad/s"}}}}},
      {"species",
       {{"mass", {{"value", 1.44316e-25}, {"unit", "kg"}}},
        {"transition_wavelength", {{"value", 780.24e-9}, {"unit", "m"}}},
        {"lattice_wavelength", {{"value", 780.34e-9}, {"unit", "m"}}},
        {"linewidth", {{"value", 2.0 * si::pi * 6.07e6}, {"unit", "rad/s"}}},
        {"circulating_power", {{"value", 0.05}, {"unit", "W"}}},
        {"trap_depth", {{"value", 460e-6}, {"unit", "K"}}},
        {"lightshift_per_photon", {{"value", -1.0}, {"unit", "rad/s"}}}}},
      {"ensemble", {{"g_mod", {{"value", 0.9}, {"unit", "1"}}}}}};
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("a Kelvin trap depth matches the preset's Joule value") {
    const ParsedConfig cfg = parse_config(minimal_config());
    const Scenario ref = rb87_paper_preset();
    CHECK(cfg.scenario.species.trap_depth == doctest::Approx(ref.species.trap_depth));
    CHECK(cfg.scenario.label == "cfg-test");
    const RunRecord a = run_scenario(cfg.scenario);
    const RunRecord b = run_scenario(ref);
    CHECK(a.get("mean_n") == b.get("mean_n"));
    CHECK(a.get("cooling_rate") == b.get("cooling_rate"));
  }
  SUBCASE("unknown keys are rejected with the valid list") {
    auto j = minimal_config();
    j["cavity"]["bogus"] = 1.0;
    try {
      parse_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("cavity.bogus") != std::string::npos);
      CHECK(std::string(e.what()).find("finesse") != std::string::npos);
    }
  }
  SUBCASE("wrong units are rejected with the accepted list") {
    auto j = minimal_config();
    j["cavity"]["waist"]["unit"] = "mm";
    try {
      parse_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("cavity.waist") != std::string::npos);
    }
  }
  SUBCASE("bare numbers without units are rejected") {
    auto j = minimal_config();
    j["cavity"]["finesse"] = 1.8e5;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SUBCASE("missing required section") {
    auto j = minimal_config();
    j.erase("species");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SUBCASE("fields section round trip") {
    auto j = minimal_config();
    j["fields"] = {{"epsilon", {{"value", 1e-3}, {"unit", "1"}}},
                   {"span", {{"value", 2e-4}, {"unit", "s"}}},
                   {"dt", {{"value", 1e-8}, {"unit", "s"}}}};
    const ParsedConfig cfg = parse_config(j);
    CHECK(cfg.fields.present);
    CHECK(cfg.fields.epsilon == 1e-3);
    CHECK(cfg.fields.omega == 0.0);      // default: sideband resonance
    CHECK(cfg.fields.transient == -1.0); // default: 5 / gamma_c
  }
}

TEST_CASE("dotted-path overrides") {
  ParsedConfig cfg = parse_config(minimal_config());
  apply_override(cfg, "ensemble.g_mod=0.5");
  CHECK(cfg.scenario.g_mod == 0.5);
  apply_override(cfg, "label=renamed");
  CHECK(cfg.scenario.label == "renamed");
  apply_override(cfg, "fields.dt=1e-8");
  CHECK(cfg.fields.present);
  CHECK(cfg.fields.dt == 1e-8);
  apply_override(cfg, "free_variable=g_mod");
  CHECK(cfg.scenario.free_var == Scenario::Free::GMod);

  SUBCASE("last write wins") {
    apply_override(cfg, "ensemble.g_mod=0.7");
    apply_override(cfg, "ensemble.g_mod=0.8");
    CHECK(cfg.scenario.g_mod == 0.8);
  }
  SUBCASE("unknown key lists the registry") {
    try {
      apply_override(cfg, "cavity.bogus=1");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("cavity.finesse") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(apply_override(cfg, "no-equals-sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "cavity.waist=tiny"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "free_variable=bogus"), ConfigError);
}
