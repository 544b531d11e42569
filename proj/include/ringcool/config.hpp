#pragma once

// Scenario configuration files: JSON with every physical quantity written as
// a {value, unit} pair. Unknown keys are rejected, units are checked, and
// dotted-path overrides are applied after parsing.

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "ringcool/common.hpp"
#include "ringcool/scenario.hpp"

namespace ringcool {

struct FieldSimConfig {
  bool present = false;
  double epsilon = 0.0;    // modulation depth 2 k z_cm0
  double omega = 0.0;      // rad/s; 0 = sideband resonance
  double span = 0.0;       // s
  double dt = 0.0;         // s
  double pump_eta = 1.0;   // field-per-photon units
  double transient = -1.0; // s; < 0 = default 5/gamma_c
};

struct ParsedConfig {
  Scenario scenario;
  FieldSimConfig fields;
};

namespace detail {

inline double read_quantity(const nlohmann::json& node, const std::string& path,
                            const std::map<std::string, double>& unit_scale) {
  if (!node.is_object() || !node.contains("value") || !node.contains("unit"))
    throw ConfigError("config: '" + path + "' must be a {value, unit} pair");
  for (const auto& [k, _] : node.items())
    if (k != "value" && k != "unit")
      throw ConfigError("config: unknown key '" + path + "." + k +
                        "'; valid keys: value, unit");
  if (!node["value"].is_number())
    throw ConfigError("config: '" + path + ".value' must be a number");
  const std::string unit = node["unit"].get<std::string>();
  const auto it = unit_scale.find(unit);
  if (it == unit_scale.end()) {
    std::string allowed;
    for (const auto& [u, _] : unit_scale) allowed += allowed.empty() ? u : ", " + u;
    throw ConfigError("config: '" + path + "' has unit '" + unit +
                      "'; accepted units: " + allowed);
  }
  return node["value"].get<double>() * it->second;
}

inline void reject_unknown(const nlohmann::json& node, const std::string& section,
                           const std::vector<std::string>& known) {
  for (const auto& [k, _] : node.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      std::string names;
      for (const auto& n : known) names += names.empty() ? n : ", " + n;
      throw ConfigError("config: unknown key '" + (section.empty() ? k : section + "." + k) +
                        "'; valid keys: " + names);
    }
  }
}

}  // namespace detail

inline ParsedConfig parse_config(const nlohmann::json& j) {
  using detail::read_quantity;
  using detail::reject_unknown;
  const std::map<std::string, double> unitless = {{"1", 1.0}};
  const std::map<std::string, double> meters = {{"m", 1.0}};
  const std::map<std::string, double> seconds = {{"s", 1.0}};
  const std::map<std::string, double> rad_per_s = {{"rad/s", 1.0}};
  const std::map<std::string, double> energy = {{"J", 1.0}, {"K", si::k_boltzmann}};

  reject_unknown(j, "", {"label", "seed", "free_variable", "cavity", "species", "ensemble",
                         "probe", "fields"});
  ParsedConfig cfg;
  Scenario& s = cfg.scenario;

  if (j.contains("label")) s.label = j["label"].get<std::string>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("free_variable")) {
    const std::string f = j["free_variable"].get<std::string>();
    if (f == "atom_number") s.free_var = Scenario::Free::AtomNumber;
    else if (f == "g_mod") s.free_var = Scenario::Free::GMod;
    else if (f == "lightshift") s.free_var = Scenario::Free::Lightshift;
    else if (f == "omega_v") s.free_var = Scenario::Free::OmegaV;
    else
      throw ConfigError("config: free_variable '" + f +
                        "' unknown; valid: atom_number, g_mod, lightshift, omega_v");
  }

  if (!j.contains("cavity") || !j.contains("species") || !j.contains("ensemble"))
    throw ConfigError("config: sections cavity, species, ensemble are required");

  const auto& c = j["cavity"];
  reject_unknown(c, "cavity", {"finesse", "waist", "roundtrip_length", "gamma_c"});
  s.cavity.finesse = read_quantity(c.at("finesse"), "cavity.finesse", unitless);
  s.cavity.waist = read_quantity(c.at("waist"), "cavity.waist", meters);
  s.cavity.roundtrip_length =
      read_quantity(c.at("roundtrip_length"), "cavity.roundtrip_length", meters);
  s.cavity.gamma_c = read_quantity(c.at("gamma_c"), "cavity.gamma_c", rad_per_s);

  const auto& sp = j["species"];
  reject_unknown(sp, "species",
                 {"mass", "transition_wavelength", "lattice_wavelength", "linewidth",
                  "circulating_power", "trap_depth", "lightshift_per_photon", "atom_number"});
  s.species.mass = read_quantity(sp.at("mass"), "species.mass", {{"kg", 1.0}});
  s.species.transition_wavelength =
      read_quantity(sp.at("transition_wavelength"), "species.transition_wavelength", meters);
  s.species.lattice_wavelength =
      read_quantity(sp.at("lattice_wavelength"), "species.lattice_wavelength", meters);
  s.species.linewidth = read_quantity(sp.at("linewidth"), "species.linewidth", rad_per_s);
  s.species.circulating_power =
      read_quantity(sp.at("circulating_power"), "species.circulating_power", {{"W", 1.0}});
  s.species.trap_depth = read_quantity(sp.at("trap_depth"), "species.trap_depth", energy);
  s.species.lightshift_per_photon = read_quantity(
      sp.at("lightshift_per_photon"), "species.lightshift_per_photon", rad_per_s);
  if (sp.contains("atom_number"))
    s.species.atom_number =
        read_quantity(sp.at("atom_number"), "species.atom_number", unitless);

  const auto& en = j["ensemble"];
  reject_unknown(en, "ensemble", {"g_mod", "epsilon"});
  s.g_mod = read_quantity(en.at("g_mod"), "ensemble.g_mod", unitless);
  if (en.contains("epsilon"))
    s.epsilon = read_quantity(en.at("epsilon"), "ensemble.epsilon", unitless);

  if (j.contains("probe")) {
    const auto& pr = j["probe"];
    reject_unknown(pr, "probe", {"omega"});
    if (pr.contains("omega"))
      s.probe_omega = read_quantity(pr.at("omega"), "probe.omega", rad_per_s);
  }

  if (j.contains("fields")) {
    const auto& f = j["fields"];
    reject_unknown(f, "fields", {"epsilon", "omega", "span", "dt", "pump_eta", "transient"});
    cfg.fields.present = true;
    cfg.fields.epsilon = read_quantity(f.at("epsilon"), "fields.epsilon", unitless);
    cfg.fields.span = read_quantity(f.at("span"), "fields.span", seconds);
    cfg.fields.dt = read_quantity(f.at("dt"), "fields.dt", seconds);
    if (f.contains("omega"))
      cfg.fields.omega = read_quantity(f.at("omega"), "fields.omega", rad_per_s);
    if (f.contains("pump_eta"))
      cfg.fields.pump_eta = read_quantity(f.at("pump_eta"), "fields.pump_eta", unitless);
    if (f.contains("transient"))
      cfg.fields.transient = read_quantity(f.at("transient"), "fields.transient", seconds);
  }
  return cfg;
}

inline ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Dotted-path overrides: --set section.key=value, applied after file parse,
// last write wins. Values are SI numbers in the key's canonical unit
// (trap depth in J), except label and free_variable which are strings.
// ---------------------------------------------------------------------------

using OverrideSetter = std::function<void(ParsedConfig&, const std::string&)>;

inline double parse_override_number(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("override '" + key + "': '" + value + "' is not a number");
  }
  if (pos != value.size())
    throw ConfigError("override '" + key + "': '" + value + "' is not a number");
  return v;
}

inline const std::map<std::string, OverrideSetter>& override_registry() {
  auto num = [](auto setter) {
    return [setter](ParsedConfig& c, const std::string& v) {
      setter(c, parse_override_number("", v));
    };
  };
  static const std::map<std::string, OverrideSetter> reg = {
      {"label", [](ParsedConfig& c, const std::string& v) { c.scenario.label = v; }},
      {"seed",
       [](ParsedConfig& c, const std::string& v) { c.scenario.seed = std::stoull(v); }},
      {"free_variable",
       [](ParsedConfig& c, const std::string& v) {
         if (v == "atom_number") c.scenario.free_var = Scenario::Free::AtomNumber;
         else if (v == "g_mod") c.scenario.free_var = Scenario::Free::GMod;
         else if (v == "lightshift") c.scenario.free_var = Scenario::Free::Lightshift;
         else if (v == "omega_v") c.scenario.free_var = Scenario::Free::OmegaV;
         else throw ConfigError("override free_variable: unknown value '" + v + "'");
       }},
      {"cavity.finesse", num([](ParsedConfig& c, double v) { c.scenario.cavity.finesse = v; })},
      {"cavity.waist", num([](ParsedConfig& c, double v) { c.scenario.cavity.waist = v; })},
      {"cavity.roundtrip_length",
       num([](ParsedConfig& c, double v) { c.scenario.cavity.roundtrip_length = v; })},
      {"cavity.gamma_c", num([](ParsedConfig& c, double v) { c.scenario.cavity.gamma_c = v; })},
      {"species.mass", num([](ParsedConfig& c, double v) { c.scenario.species.mass = v; })},
      {"species.transition_wavelength",
       num([](ParsedConfig& c, double v) { c.scenario.species.transition_wavelength = v; })},
      {"species.lattice_wavelength",
       num([](ParsedConfig& c, double v) { c.scenario.species.lattice_wavelength = v; })},
      {"species.linewidth",
       num([](ParsedConfig& c, double v) { c.scenario.species.linewidth = v; })},
      {"species.circulating_power",
       num([](ParsedConfig& c, double v) { c.scenario.species.circulating_power = v; })},
      {"species.trap_depth",
       num([](ParsedConfig& c, double v) { c.scenario.species.trap_depth = v; })},
      {"species.lightshift_per_photon",
       num([](ParsedConfig& c, double v) { c.scenario.species.lightshift_per_photon = v; })},
      {"species.atom_number",
       num([](ParsedConfig& c, double v) { c.scenario.species.atom_number = v; })},
      {"ensemble.g_mod", num([](ParsedConfig& c, double v) { c.scenario.g_mod = v; })},
      {"ensemble.epsilon", num([](ParsedConfig& c, double v) { c.scenario.epsilon = v; })},
      {"probe.omega", num([](ParsedConfig& c, double v) { c.scenario.probe_omega = v; })},
      {"fields.epsilon",
       num([](ParsedConfig& c, double v) { c.fields.epsilon = v; c.fields.present = true; })},
      {"fields.omega",
       num([](ParsedConfig& c, double v) { c.fields.omega = v; c.fields.present = true; })},
      {"fields.span",
       num([](ParsedConfig& c, double v) { c.fields.span = v; c.fields.present = true; })},
      {"fields.dt",
       num([](ParsedConfig& c, double v) { c.fields.dt = v; c.fields.present = true; })},
      {"fields.pump_eta",
       num([](ParsedConfig& c, double v) { c.fields.pump_eta = v; c.fields.present = true; })},
      {"fields.transient",
       num([](ParsedConfig& c, double v) { c.fields.transient = v; c.fields.present = true; })},
  };
  return reg;
}

// "key=value" form; throws ConfigError listing valid keys on a miss.
inline void apply_override(ParsedConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' must have the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto& reg = override_registry();
  const auto it = reg.find(key);
  if (it == reg.end())
    throw ConfigError("override: unknown key '" + key + "'; valid keys: " +
                      known_names(reg));
  try {
    it->second(cfg, value);
  } catch (const ConfigError&) {
    throw ConfigError("override '" + key + "': '" + value + "' is not a valid value");
  } catch (const std::exception&) {
    throw ConfigError("override '" + key + "': '" + value + "' is not a valid value");
  }
}

}  // namespace ringcool
