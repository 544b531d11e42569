// Acceptance gate: ten pinned criteria, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <random>

#include "ringcool/config.hpp"
#include "ringcool/kinetics.hpp"
#include "ringcool/modes.hpp"
#include "ringcool/params.hpp"
#include "ringcool/scenario.hpp"

using namespace ringcool;

namespace {

int failures = 0;

void report(int index, const char* name, bool pass, const char* detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", index, name, detail);
  if (!pass) ++failures;
}

bool within(double value, double lo, double hi) { return value >= lo && value <= hi; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

int main() {
  const RunRecord rec = run_scenario(rb87_paper_preset());
  char detail[256];

  // 1. Cavity-to-free-space scattering ratio eta_c.
  {
    const double value = eta_c(1.8e5, 130e-6, 780.24e-9);
    const double oracle = 0.6273557163268002;  // 12 F / (pi (2 pi w0 / lambda)^2)
    const bool pass = rel(value, 0.6) < 0.10 && rel(value, oracle) < 0.005;
    std::snprintf(detail, sizeof detail,
                  "eta_c = %.4f (target 0.6 +/- 10%%, oracle %.5f +/- 0.5%%)", value, oracle);
    report(1, "eta_c reproduction", pass, detail);
  }

  // 2. Exponential cooling rate from the preset.
  {
    const double rate = rec.get("cooling_rate");
    std::snprintf(detail, sizeof detail, "rate = %.2f 1/s (window [85, 110] 1/s)", rate);
    report(2, "cooling rate window", within(rate, 85.0, 110.0), detail);
  }

  // 3. Steady-state occupancy and reported temperature.
  {
    const double mean = rec.get("mean_n");
    const double temp = rec.get("temperature_report");
    const bool pass = within(mean, 0.63, 0.68) && within(temp, 11e-6, 13e-6);
    std::snprintf(detail, sizeof detail,
                  "<n> = %.4f (window [0.63, 0.68]), T = %.2f uK (window [11, 13] uK)",
                  mean, temp * 1e6);
    report(3, "steady occupancy + temperature", pass, detail);
  }

  // 4. Resonant atom number.
  {
    const double n = rec.get("atom_number");
    std::snprintf(detail, sizeof detail, "N = %.4g (target 1.33e6 +/- 5%%)", n);
    report(4, "resonant atom number", rel(n, 1.33e6) < 0.05, detail);
  }

  // 5. Free-space scattering rate consistency.
  {
    const double gt = rec.get("gamma_tilde");
    std::snprintf(detail, sizeof detail, "Gamma~ = %.4g 1/s (target 8e3 +/- 15%%)", gt);
    report(5, "scattering-rate consistency", rel(gt, 8e3) < 0.15, detail);
  }

  // 6. Trap depth <-> trap frequency relation.
  {
    const double omega_r = recoil_frequency(1.44316e-25, 780.34e-9);
    const double depth = si::k_boltzmann * 460e-6;
    const double omega_v = trap_frequency_from_depth(depth, omega_r);
    const double roundtrip = depth_from_trap_frequency(omega_v, omega_r);
    const bool pass =
        rel(omega_v, 2.0 * si::pi * 380e3) < 0.02 && rel(roundtrip, depth) < 1e-12;
    std::snprintf(detail, sizeof detail,
                  "omega_V/2pi = %.1f kHz (target 380 kHz +/- 2%%), inverse to 1e-12",
                  omega_v / (2.0 * si::pi * 1e3));
    report(6, "trap depth <-> frequency", pass, detail);
  }

  // 7. Field-dynamics oracle suite.
  {
    // (a) integrated steady state vs the closed-form carrier, 1e-8 relative.
    const CoupledModeSystem sys{-3.8, -2.0, 1.0, 1.0};
    const Complex eta{1.0, 0.0};
    const Complex analytic = steady_state_carrier(sys, 0.9, eta);
    const auto rk4 = integrate_modes(
        sys, {}, {eta, eta}, [](double) { return Complex{0.9, 0.0}; }, 40.0, 5e-4);
    const auto exact = integrate_modes(sys, {}, {eta, eta}, Complex{0.9, 0.0}, 40.0, 0.05);
    const double err_a = std::max(
        std::abs(rk4.alpha_plus[rk4.times.size() - 1] - analytic) / std::abs(analytic),
        std::abs(exact.alpha_plus[exact.times.size() - 1] - analytic) / std::abs(analytic));

    // (b) demodulated sidebands vs the small-signal formula, 25-cell grid.
    double err_b = 0.0;
    const double n_delta0 = -2.0, eps = 1e-3;
    for (double g : {0.2, 0.4, 0.6, 0.8, 0.95}) {
      const auto res = find_splitting_resonance(n_delta0, g);
      for (double scale : {0.6, 0.8, 1.0, 1.25, 1.5}) {
        const double omega = scale * res.omega_star;
        const CoupledModeSystem cell{res.delta_c_star, n_delta0, 1.0, 1.0};
        const Complex alpha0 = steady_state_carrier(cell, g, eta);
        const double period = 2.0 * si::pi / omega;
        const double transient = 15.0;
        const auto series =
            integrate_modes(cell, {alpha0, alpha0}, {eta, eta},
                            modulated_localization(g, eps, omega),
                            transient + 26.0 * period, 2e-3);
        const auto d = demodulate_sidebands(series, omega, transient);
        const auto ref =
            sideband_amplitudes(alpha0, n_delta0, eps, cell.delta_c, omega, g, 1.0);
        err_b = std::max(err_b, std::abs(d.beta - ref.beta) / std::abs(ref.beta));
        err_b = std::max(err_b, std::abs(d.gamma - ref.gamma) / std::abs(ref.gamma));
      }
    }

    // (c) eigen-splitting on 1000 random instances, 1e-10.
    double err_c = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-5.0, 5.0), unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double nd0 = mag(rng);
      const Complex g = unit(rng) * std::exp(Complex{0.0, 2.0 * si::pi * unit(rng)});
      const ModeMatrix m(mag(rng), nd0, g, std::abs(mag(rng)) + 0.1);
      Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m.matrix());
      const double split = std::abs(es.eigenvalues()[0].imag() - es.eigenvalues()[1].imag());
      const double expected = 2.0 * std::abs(nd0) * std::abs(g);
      err_c = std::max(err_c, std::abs(split - expected) / (expected + 1.0));
    }

    const bool pass = err_a < 1e-8 && err_b < 0.01 && err_c < 1e-10;
    std::snprintf(detail, sizeof detail,
                  "steady %.1e (<1e-8), sidebands %.2e (<1e-2), splitting %.1e (<1e-10)",
                  err_a, err_b, err_c);
    report(7, "field-dynamics oracle suite", pass, detail);
  }

  // 8. Power-flux pipeline vs the Lorentzian rate law at resonance.
  {
    const double residual = rec.get("crosscheck_residual");
    // evaluate the bracket at the exact sideband resonance of the solved scenario
    const double omega_star = rec.get("omega_star");
    const double n_delta0_g =
        rec.get("atom_number") * rec.get("lightshift_per_photon") * rec.get("g_mod");
    const double gamma_c = rec.get("gamma_c");
    const double bracket = lorentzian_response(omega_star, n_delta0_g, gamma_c) -
                           lorentzian_response(-omega_star, n_delta0_g, gamma_c);
    const double bracket_err =
        std::abs(bracket - (1.0 - xi_suppression(omega_star, gamma_c)));
    const bool pass = residual < 1e-6 && bracket_err < 1e-12;
    std::snprintf(detail, sizeof detail,
                  "pipeline residual %.1e (<1e-6), resonance bracket error %.1e (<1e-12)",
                  residual, bracket_err);
    report(8, "cross-derivation identity", pass, detail);
  }

  // 9. Kinetics oracle suite.
  {
    const LadderRates rates{0.01, 0.627, 1.25e-4, 8e3};
    const auto target = steady_state_distribution(rates.eta_c, rates.xi, 400);
    const auto traj = evolve_populations(thermal_state(10.0, 400), rates, 1.0, 0.01);
    const double tv =
        0.5 * (traj.final().populations - target.populations).cwiseAbs().sum();
    double drift = 0.0;
    for (Eigen::Index i = 0; i < traj.times.size(); ++i)
      drift = std::max(drift, std::abs(traj.populations.col(i).sum() - 1.0));

    LadderState init{Eigen::VectorXd::Zero(80)};
    init.populations[5] = 1.0;
    const double reference = evolve_populations(init, rates, 0.01, 1e-4).final().mean_n();
    double worst_sigma = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto stats = monte_carlo_ladder(5, rates, 0.01, seed, 10000);
      worst_sigma = std::max(worst_sigma, std::abs(stats.mean - reference) / stats.std_error);
    }
    const bool pass = tv < 1e-6 && drift < 1e-12 && worst_sigma < 3.0;
    std::snprintf(detail, sizeof detail,
                  "stationary TV %.1e (<1e-6), drift %.1e (<1e-12), MC %.2f sigma (<3)",
                  tv, drift, worst_sigma);
    report(9, "kinetics oracle suite", pass, detail);
  }

  // 10. Convention identity between the classical fixed point and the ladder.
  {
    const double err =
        rel(rec.get("temperature_steady"), 0.5 * rec.get("temperature_report"));
    std::snprintf(detail, sizeof detail,
                  "T_inf vs (hbar omega_V / 2 k_B) <n>: relative error %.1e (<1e-12)", err);
    report(10, "convention identity", err < 1e-12, detail);
  }

  if (failures == 0)
    std::printf("all 10 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
