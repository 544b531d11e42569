#pragma once

// Self-consistent scenario assembly: resonance solving across modules,
// reproduction of the rubidium design point, parameter sweeps, and
// persistent run records.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ringcool/common.hpp"
#include "ringcool/constants.hpp"
#include "ringcool/kinetics.hpp"
#include "ringcool/modes.hpp"
#include "ringcool/params.hpp"

namespace ringcool {

// ---------------------------------------------------------------------------
// Resonance solving: omega_V = 2 N |Delta_0| |g|
// ---------------------------------------------------------------------------

inline long long solve_resonant_atom_number(double omega_V, double delta_0, double g_mod) {
  if (delta_0 >= 0.0)
    throw std::domain_error("solve_resonant_atom_number: Delta_0 must be < 0");
  if (g_mod <= 0.0 || g_mod > 1.0)
    throw std::domain_error("solve_resonant_atom_number: need 0 < |g| <= 1");
  if (omega_V <= 0.0)
    throw std::domain_error("solve_resonant_atom_number: omega_V must be > 0");
  return std::llround(omega_V / (2.0 * std::abs(delta_0) * g_mod));
}

inline double solve_resonant_g_mod(double omega_V, double delta_0, double n_atoms) {
  if (delta_0 >= 0.0 || omega_V <= 0.0 || n_atoms < 1.0)
    throw std::domain_error("solve_resonant_g_mod: invalid inputs");
  const double g = omega_V / (2.0 * std::abs(delta_0) * n_atoms);
  if (g > 1.0) throw std::domain_error("solve_resonant_g_mod: required |g| exceeds 1");
  return g;
}

inline double solve_resonant_lightshift(double omega_V, double n_atoms, double g_mod) {
  if (omega_V <= 0.0 || n_atoms < 1.0 || g_mod <= 0.0 || g_mod > 1.0)
    throw std::domain_error("solve_resonant_lightshift: invalid inputs");
  return -omega_V / (2.0 * n_atoms * g_mod);
}

inline double solve_resonant_omega_v(double delta_0, double n_atoms, double g_mod) {
  if (delta_0 >= 0.0 || n_atoms < 1.0 || g_mod <= 0.0 || g_mod > 1.0)
    throw std::domain_error("solve_resonant_omega_v: invalid inputs");
  return 2.0 * n_atoms * std::abs(delta_0) * g_mod;
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct Scenario {
  std::string label = "custom";
  CavityParams cavity;
  SpeciesDrive species;
  double g_mod = 0.0;
  double epsilon = 0.0;      // center-of-mass modulation depth for field runs
  double probe_omega = 0.0;  // rad/s; 0 = evaluate the rate law at omega_V
  std::uint64_t seed = 1;

  enum class Free { AtomNumber, GMod, Lightshift, OmegaV };
  Free free_var = Free::AtomNumber;  // exactly one free variable per solve

  void validate() const {
    cavity.validate();
    species.validate();
    if (label.find_first_of(" \t\n") != std::string::npos)
      throw ConfigError("Scenario: label must not contain whitespace");
    if (free_var != Free::GMod && (g_mod <= 0.0 || g_mod > 1.0))
      throw std::domain_error("Scenario: need 0 < g_mod <= 1");
    if (free_var != Free::AtomNumber && species.atom_number < 1.0)
      throw std::domain_error("Scenario: atom_number must be set unless it is the free variable");
  }
};

// The rubidium design point. Values the source design states are pinned as
// given; Gamma and the Rb-87 mass are standard reference values.
inline Scenario rb87_paper_preset() {
  Scenario s;
  s.label = "rb87-paper";
  s.cavity.finesse = 1.8e5;
  s.cavity.waist = 130e-6;
  s.cavity.roundtrip_length = 0.1;  // placeholder; gamma_0-dependent outputs are labeled
  s.cavity.gamma_c = si::pi * 1.7e4;
  s.species.mass = 1.44316e-25;
  s.species.transition_wavelength = 780.24e-9;
  s.species.linewidth = 2.0 * si::pi * 6.07e6;
  s.species.lattice_wavelength = 780.34e-9;  // 0.1 nm red of the D2 line
  s.species.circulating_power = 0.05;
  s.species.trap_depth = si::k_boltzmann * 460e-6;
  s.species.lightshift_per_photon = -1.0;
  s.species.atom_number = 0.0;  // solved from the resonance condition
  s.g_mod = 0.9;
  s.free_var = Scenario::Free::AtomNumber;
  return s;
}

inline Scenario named_preset(const std::string& name) {
  if (name == "rb87-paper") return rb87_paper_preset();
  throw ConfigError("unknown preset '" + name + "'; available: rb87-paper");
}

// ---------------------------------------------------------------------------
// Run record
// ---------------------------------------------------------------------------

struct RunRecord {
  std::string label;
  std::string timestamp;  // ISO-8601 UTC
  std::uint64_t seed = 0;

  // Ordered key -> (value, unit); serialized one record per line as
  // key:value[unit] pairs with 17 significant digits (binary-exact for IEEE
  // doubles on round trip).
  std::vector<std::pair<std::string, std::pair<double, std::string>>> fields;
  WarningList warnings;

  void add(const std::string& key, double value, const std::string& unit) {
    fields.emplace_back(key, std::make_pair(value, unit));
  }
  double get(const std::string& key) const {
    for (const auto& [k, vu] : fields)
      if (k == key) return vu.first;
    throw ConfigError("RunRecord: no field '" + key + "'");
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "label:" << label << " timestamp:" << timestamp << " seed:" << seed;
    char buf[64];
    for (const auto& [k, vu] : fields) {
      std::snprintf(buf, sizeof buf, "%.17g", vu.first);
      out << ' ' << k << ':' << buf << '[' << vu.second << ']';
    }
    return out.str();
  }

  static RunRecord parse(const std::string& line) {
    RunRecord rec;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw ConfigError("RunRecord::parse: malformed token '" + token + "'");
      const std::string key = token.substr(0, colon);
      const std::string rest = token.substr(colon + 1);
      if (key == "label") {
        rec.label = rest;
      } else if (key == "timestamp") {
        rec.timestamp = rest;
      } else if (key == "seed") {
        rec.seed = std::stoull(rest);
      } else {
        const auto bracket = rest.find('[');
        if (bracket == std::string::npos || rest.back() != ']')
          throw ConfigError("RunRecord::parse: field '" + key + "' missing unit suffix");
        rec.add(key, std::stod(rest.substr(0, bracket)),
                rest.substr(bracket + 1, rest.size() - bracket - 2));
      }
    }
    return rec;
  }
};

inline std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

inline RunRecord run_scenario(const Scenario& scenario) {
  Scenario s = scenario;  // free-variable solve mutates the working copy
  s.validate();

  const double k = s.species.wavenumber();
  const double omega_r = recoil_frequency(s.species.mass, s.species.lattice_wavelength);

  RunRecord rec;
  rec.label = s.label;
  rec.seed = s.seed;
  rec.timestamp = iso_timestamp_utc();

  // Resonance condition omega_V = 2 N |Delta_0| |g| for the free variable.
  double omega_v = 0.0;
  switch (s.free_var) {
    case Scenario::Free::AtomNumber:
      omega_v = trap_frequency_from_depth(s.species.trap_depth, omega_r);
      s.species.atom_number = static_cast<double>(
          solve_resonant_atom_number(omega_v, s.species.lightshift_per_photon, s.g_mod));
      break;
    case Scenario::Free::GMod:
      omega_v = trap_frequency_from_depth(s.species.trap_depth, omega_r);
      s.g_mod = solve_resonant_g_mod(omega_v, s.species.lightshift_per_photon,
                                     s.species.atom_number);
      break;
    case Scenario::Free::Lightshift:
      omega_v = trap_frequency_from_depth(s.species.trap_depth, omega_r);
      s.species.lightshift_per_photon =
          solve_resonant_lightshift(omega_v, s.species.atom_number, s.g_mod);
      break;
    case Scenario::Free::OmegaV:
      omega_v = solve_resonant_omega_v(s.species.lightshift_per_photon,
                                       s.species.atom_number, s.g_mod);
      s.species.trap_depth = depth_from_trap_frequency(omega_v, omega_r);
      break;
  }

  DerivedRatios ratios;
  ratios.eta_c = eta_c(s.cavity.finesse, s.cavity.waist, s.species.lattice_wavelength);
  ratios.eta_LD = lamb_dicke(omega_r, omega_v, &rec.warnings);
  ratios.xi = xi_suppression(omega_v, s.cavity.gamma_c);
  const double gamma_tilde = free_space_scattering_rate(
      s.species.trap_depth, s.species.linewidth, s.species.delta_at(), &rec.warnings);
  const double t_recoil = recoil_temperature(omega_r);

  const double n_delta0 = s.species.atom_number * s.species.lightshift_per_photon;
  const SplittingResonance res = find_splitting_resonance(n_delta0, s.g_mod);

  const double mean_n = mean_n_steady(ratios.eta_c, ratios.xi);
  const double pi0 = ground_population_steady(ratios.eta_c, ratios.xi);
  const double t_report = temperature_report(mean_n, omega_v);
  const double rate = cooling_rate_classical(ratios, gamma_tilde);
  const double t_steady = steady_temperature_classical(ratios, gamma_tilde, t_recoil);

  // Field-pipeline cross check at resonance; the rate ratio is
  // temperature-independent, evaluated at a nominal loading temperature.
  const double t_ref = 120e-6;
  const double rate_pipeline = pipeline_cooling_rate(
      omega_v, n_delta0, s.g_mod, s.cavity.gamma_c, ratios.eta_c, gamma_tilde,
      s.species.lightshift_per_photon, k, s.species.mass, s.species.atom_number,
      s.species.lattice_omega(), t_ref);
  const double rate_lorentzian = lorentzian_cooling_rate(
      omega_v, n_delta0 * s.g_mod, s.cavity.gamma_c, ratios, gamma_tilde);
  const double residual = std::abs(rate_pipeline - rate_lorentzian) / rate_lorentzian;

  const double probe = (s.probe_omega > 0.0) ? s.probe_omega : omega_v;
  const double probe_rate = lorentzian_cooling_rate(probe, n_delta0 * s.g_mod,
                                                    s.cavity.gamma_c, ratios, gamma_tilde);

  // Scenario snapshot
  rec.add("finesse", s.cavity.finesse, "1");
  rec.add("waist", s.cavity.waist, "m");
  rec.add("roundtrip_length", s.cavity.roundtrip_length, "m");
  rec.add("gamma_c", s.cavity.gamma_c, "rad/s");
  rec.add("mass", s.species.mass, "kg");
  rec.add("transition_wavelength", s.species.transition_wavelength, "m");
  rec.add("lattice_wavelength", s.species.lattice_wavelength, "m");
  rec.add("linewidth", s.species.linewidth, "rad/s");
  rec.add("circulating_power", s.species.circulating_power, "W");
  rec.add("trap_depth", s.species.trap_depth, "J");
  rec.add("lightshift_per_photon", s.species.lightshift_per_photon, "rad/s");
  rec.add("g_mod", s.g_mod, "1");
  // Derived ratios and rates
  rec.add("wavenumber", k, "rad/m");
  rec.add("omega_R", omega_r, "rad/s");
  rec.add("omega_V", omega_v, "rad/s");
  rec.add("delta_at", s.species.delta_at(), "rad/s");
  rec.add("eta_c", ratios.eta_c, "1");
  rec.add("eta_LD", ratios.eta_LD, "1");
  rec.add("xi", ratios.xi, "1");
  rec.add("gamma_tilde", gamma_tilde, "1/s");
  rec.add("recoil_temperature", t_recoil, "K");
  // Resonance solution
  rec.add("atom_number", s.species.atom_number, "1");
  rec.add("delta_c_star", res.delta_c_star, "rad/s");
  rec.add("omega_star", res.omega_star, "rad/s");
  // Steady-state kinetics and temperature dynamics
  rec.add("mean_n", mean_n, "1");
  rec.add("pi0", pi0, "1");
  rec.add("temperature_report", t_report, "K");
  rec.add("cooling_rate", rate, "1/s");
  rec.add("time_1e", 1.0 / rate, "s");
  rec.add("temperature_steady", t_steady, "K");
  rec.add("lorentzian_rate", probe_rate, "1/s");
  rec.add("crosscheck_residual", residual, "1");
  return rec;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

using AxisSetter = std::function<void(Scenario&, double)>;

inline const std::map<std::string, AxisSetter>& sweep_axes() {
  static const std::map<std::string, AxisSetter> axes = {
      {"cavity.finesse", [](Scenario& s, double v) { s.cavity.finesse = v; }},
      {"cavity.waist", [](Scenario& s, double v) { s.cavity.waist = v; }},
      {"cavity.roundtrip_length",
       [](Scenario& s, double v) { s.cavity.roundtrip_length = v; }},
      {"cavity.gamma_c", [](Scenario& s, double v) { s.cavity.gamma_c = v; }},
      {"species.mass", [](Scenario& s, double v) { s.species.mass = v; }},
      {"species.trap_depth", [](Scenario& s, double v) { s.species.trap_depth = v; }},
      {"species.circulating_power",
       [](Scenario& s, double v) { s.species.circulating_power = v; }},
      {"species.lightshift_per_photon",
       [](Scenario& s, double v) { s.species.lightshift_per_photon = v; }},
      {"species.atom_number", [](Scenario& s, double v) { s.species.atom_number = v; }},
      {"ensemble.g_mod", [](Scenario& s, double v) { s.g_mod = v; }},
      {"ensemble.epsilon", [](Scenario& s, double v) { s.epsilon = v; }},
      {"probe.omega", [](Scenario& s, double v) { s.probe_omega = v; }},
  };
  return axes;
}

inline std::string known_names(const auto& registry) {
  std::string out;
  for (const auto& [name, _] : registry) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

inline const std::vector<std::string>& sweep_metrics() {
  static const std::vector<std::string> metrics = {
      "eta_c",        "eta_LD",          "xi",           "gamma_tilde",
      "omega_V",      "mean_n",          "pi0",          "temperature_report",
      "cooling_rate", "time_1e",         "atom_number",  "lorentzian_rate",
      "omega_star",   "delta_c_star",    "temperature_steady", "crosscheck_residual"};
  return metrics;
}

struct SweepTable {
  std::string axis;
  std::vector<std::string> metrics;
  std::vector<double> values;      // one per row
  Eigen::MatrixXd results;         // rows x metrics
};

inline SweepTable sweep(const Scenario& base, const std::string& axis,
                        const std::vector<double>& values,
                        const std::vector<std::string>& metrics, int jobs = 1) {
  const auto& axes = sweep_axes();
  const auto it = axes.find(axis);
  if (it == axes.end())
    throw ConfigError("sweep: unknown axis '" + axis + "'; valid axes: " + known_names(axes));
  if (values.empty()) throw ConfigError("sweep: empty value list");
  for (const auto& m : metrics) {
    const auto& known = sweep_metrics();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      std::string names;
      for (const auto& n : known) names += names.empty() ? n : ", " + n;
      throw ConfigError("sweep: unknown metric '" + m + "'; valid metrics: " + names);
    }
  }

  SweepTable table;
  table.axis = axis;
  table.metrics = metrics;
  table.values = values;
  table.results.resize(static_cast<Eigen::Index>(values.size()),
                       static_cast<Eigen::Index>(metrics.size()));

  std::vector<std::exception_ptr> errors(values.size());
  auto run_row = [&](std::size_t i) {
    try {
      Scenario s = base;
      it->second(s, values[i]);
      const RunRecord rec = run_scenario(s);
      for (std::size_t j = 0; j < metrics.size(); ++j)
        table.results(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rec.get(metrics[j]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) run_row(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < values.size(); i = next++) run_row(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return table;
}

// RFC-4180 CSV; rows are ordered by the input value list regardless of jobs.
inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(const SweepTable& table, std::ostream& out) {
  out << csv_quote(table.axis);
  for (const auto& m : table.metrics) out << ',' << csv_quote(m);
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", table.values[i]);
    out << buf;
    for (Eigen::Index j = 0; j < table.results.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g",
                    table.results(static_cast<Eigen::Index>(i), j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace ringcool
