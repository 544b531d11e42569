// Command-line front end: scenario runs, parameter sweeps, and coupled-mode
// field simulations. Exit codes: 0 success, 1 numerical/physical guard,
// 2 configuration error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ringcool/config.hpp"
#include "ringcool/kinetics.hpp"
#include "ringcool/modes.hpp"
#include "ringcool/scenario.hpp"

namespace fs = std::filesystem;
using namespace ringcool;

namespace {

struct CommonOpts {
  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--preset", opts.preset, "named preset (rb87-paper)");
  cmd->add_option("--config", opts.config_path, "scenario config file (JSON)");
  cmd->add_option("--set", opts.overrides, "override, dotted path key=value (repeatable)");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "random seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_flag("--quiet", opts.quiet, "suppress the summary");
  cmd->add_flag("--verbose", opts.verbose, "print extra detail");
}

ParsedConfig resolve_config(const CommonOpts& opts) {
  ParsedConfig cfg;
  if (!opts.preset.empty() && !opts.config_path.empty())
    throw ConfigError("--preset and --config are mutually exclusive");
  if (!opts.preset.empty()) {
    cfg.scenario = named_preset(opts.preset);
  } else if (!opts.config_path.empty()) {
    cfg = load_config_file(opts.config_path);
  } else {
    throw ConfigError("one of --preset or --config is required");
  }
  for (const auto& ov : opts.overrides) apply_override(cfg, ov);
  if (opts.seed_set) cfg.scenario.seed = opts.seed;
  return cfg;
}

fs::path ensure_out_dir(const CommonOpts& opts) {
  fs::path dir(opts.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("output directory '" + opts.out_dir + "' is not writable");
  return dir;
}

void print_applied_overrides(const CommonOpts& opts) {
  for (const auto& ov : opts.overrides) std::cout << "override applied: " << ov << '\n';
}

void print_summary(const RunRecord& rec, bool preset_run) {
  std::cout << "scenario: " << rec.label << "\n";
  struct Row {
    const char* key;
    const char* display;
    double scale;
    const char* unit;
    const char* target;  // design-point targets, shown for preset runs
  };
  const Row rows[] = {
      {"eta_c", "eta_c", 1.0, "", "0.6"},
      {"eta_LD", "eta_LD", 1.0, "", "1e-2"},
      {"xi", "xi", 1.0, "", "-"},
      {"gamma_tilde", "gamma_tilde", 1.0, " 1/s", "8e3 1/s"},
      {"omega_V", "omega_V/2pi", 1.0 / (2.0 * si::pi), " Hz", "380 kHz"},
      {"atom_number", "atom_number", 1.0, "", "1.3e6"},
      {"mean_n", "mean_n", 1.0, "", "0.66"},
      {"pi0", "pi0", 1.0, "", ">0.5"},
      {"temperature_report", "temperature_report", 1e6, " uK", "12 uK"},
      {"cooling_rate", "cooling_rate", 1.0, " 1/s", "100 1/s"},
      {"time_1e", "time_1e", 1e3, " ms", "10 ms"},
      {"crosscheck_residual", "crosscheck_residual", 1.0, "", "<1e-6"},
  };
  for (const auto& row : rows) {
    std::cout << "  " << row.display << ": " << rec.get(row.key) * row.scale << row.unit;
    if (preset_run) std::cout << "   [target " << row.target << "]";
    std::cout << '\n';
  }
  for (const auto& w : rec.warnings) std::cout << "  warning: " << w << '\n';
}

int cmd_scenario(const CommonOpts& opts) {
  const ParsedConfig cfg = resolve_config(opts);
  const fs::path dir = ensure_out_dir(opts);
  const RunRecord rec = run_scenario(cfg.scenario);

  const fs::path record_path = dir / (rec.label + ".runrec");
  std::ofstream out(record_path, std::ios::app);
  if (!out) throw ConfigError("cannot write '" + record_path.string() + "'");
  out << rec.serialize() << '\n';

  if (!opts.quiet) {
    print_applied_overrides(opts);
    print_summary(rec, !opts.preset.empty());
    std::cout << "run record appended to " << record_path.string() << '\n';
  }
  return 0;
}

std::vector<double> parse_values(const std::string& values_arg, const std::string& range_arg) {
  std::vector<double> values;
  if (!values_arg.empty() && !range_arg.empty())
    throw ConfigError("--values and --range are mutually exclusive");
  if (!values_arg.empty()) {
    std::istringstream in(values_arg);
    std::string tok;
    while (std::getline(in, tok, ','))
      if (!tok.empty()) values.push_back(parse_override_number("--values", tok));
  } else if (!range_arg.empty()) {
    // start:stop:count, inclusive linear grid
    double start = 0, stop = 0;
    long count = 0;
    if (std::sscanf(range_arg.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3)
      throw ConfigError("--range must have the form start:stop:count");
    if (count < 1) throw ConfigError("--range: count must be >= 1");
    for (long i = 0; i < count; ++i)
      values.push_back(count == 1 ? start
                                  : start + (stop - start) * double(i) / double(count - 1));
  }
  if (values.empty()) throw ConfigError("sweep: no axis values given");
  return values;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis, const std::string& values_arg,
              const std::string& range_arg, const std::string& metrics_arg, int jobs) {
  const ParsedConfig cfg = resolve_config(opts);
  const fs::path dir = ensure_out_dir(opts);
  const std::vector<double> values = parse_values(values_arg, range_arg);

  std::vector<std::string> metrics;
  std::istringstream in(metrics_arg);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) metrics.push_back(tok);
  if (metrics.empty()) throw ConfigError("sweep: no metrics given");

  const SweepTable table = sweep(cfg.scenario, axis, values, metrics, jobs);
  const fs::path csv_path = dir / (cfg.scenario.label + "_sweep.csv");
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write '" + csv_path.string() + "'");
  write_csv(table, out);
  if (!opts.quiet) {
    print_applied_overrides(opts);
    std::cout << "sweep over " << axis << " (" << values.size() << " rows) written to "
              << csv_path.string() << '\n';
  }
  return 0;
}

int cmd_fields(const CommonOpts& opts) {
  const ParsedConfig cfg = resolve_config(opts);
  if (!cfg.fields.present)
    throw ConfigError("fields: config has no 'fields' block (epsilon, span, dt required)");
  if (cfg.fields.span <= 0.0 || cfg.fields.dt <= 0.0)
    throw ConfigError("fields: span and dt must be > 0");
  const fs::path dir = ensure_out_dir(opts);

  // Resolve the scenario (atom number, resonance) first.
  const RunRecord rec = run_scenario(cfg.scenario);
  const double n_delta0 = rec.get("atom_number") * rec.get("lightshift_per_photon");
  const double g_mod = rec.get("g_mod");
  CoupledModeSystem sys;
  sys.gamma_c = rec.get("gamma_c");
  sys.n_delta0 = n_delta0;
  sys.delta_c = rec.get("delta_c_star");
  sys.gamma_0 = si::speed_of_light / rec.get("roundtrip_length");
  const double omega = cfg.fields.omega > 0.0 ? cfg.fields.omega : rec.get("omega_star");
  const double transient =
      cfg.fields.transient >= 0.0 ? cfg.fields.transient : 5.0 / sys.gamma_c;
  const Complex eta{cfg.fields.pump_eta, 0.0};
  const auto pump = std::make_pair(eta, eta);

  FieldTimeSeries series;
  if (cfg.fields.epsilon > 0.0) {
    series = integrate_modes(sys, FieldState{}, pump,
                             modulated_localization(g_mod, cfg.fields.epsilon, omega),
                             cfg.fields.span, cfg.fields.dt);
  } else {
    series = integrate_modes(sys, FieldState{}, pump, Complex{g_mod, 0.0}, cfg.fields.span,
                             cfg.fields.dt);
  }

  const fs::path csv_path = dir / (cfg.scenario.label + "_fields.csv");
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write '" + csv_path.string() + "'");
  write_csv(series, out);

  const Demodulation demod = demodulate_sidebands(series, omega, transient);
  const Complex alpha_ref = steady_state_carrier(sys, g_mod, eta);
  const SidebandPair ref = sideband_amplitudes(alpha_ref, n_delta0, cfg.fields.epsilon,
                                               sys.delta_c, omega, g_mod, sys.gamma_c);
  if (!opts.quiet) {
    print_applied_overrides(opts);
    std::cout << "field time series written to " << csv_path.string() << '\n';
    std::cout << "  carrier: " << demod.carrier << "  (analytic " << alpha_ref << ")\n";
    std::cout << "  beta:    " << demod.beta << '\n';
    std::cout << "  gamma:   " << demod.gamma << '\n';
    std::cout << "  carrier residual: "
              << std::abs(demod.carrier - alpha_ref) / std::abs(alpha_ref) << '\n';
    if (cfg.fields.epsilon > 0.0)
      std::cout << "  sideband residual vs small-signal formula: "
                << std::abs(demod.beta - ref.beta) / std::abs(ref.beta) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ring-cavity collective sideband cooling toolkit"};
  app.require_subcommand(1);

  CommonOpts scen_opts, sweep_opts, fields_opts;
  auto* scen = app.add_subcommand("scenario", "run a scenario and write a run record");
  add_common(scen, scen_opts);

  auto* sw = app.add_subcommand("sweep", "sweep one parameter and write a CSV table");
  add_common(sw, sweep_opts);
  std::string axis, values_arg, range_arg, metrics_arg = "mean_n,cooling_rate";
  int jobs = 1;
  sw->add_option("--axis", axis, "swept parameter (dotted path)")->required();
  sw->add_option("--values", values_arg, "comma-separated axis values");
  sw->add_option("--range", range_arg, "start:stop:count inclusive grid");
  sw->add_option("--metrics", metrics_arg, "comma-separated metric names");
  sw->add_option("--jobs", jobs, "parallel rows");

  auto* fl = app.add_subcommand("fields", "integrate the coupled-mode equations");
  add_common(fl, fields_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (scen->parsed()) return cmd_scenario(scen_opts);
    if (sw->parsed()) return cmd_sweep(sweep_opts, axis, values_arg, range_arg, metrics_arg, jobs);
    if (fl->parsed()) return cmd_fields(fields_opts);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const StabilityError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return 1;
  } catch (const TruncationError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "physical guard: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
