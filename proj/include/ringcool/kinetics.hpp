#pragma once

// Vibrational-ladder kinetics: anti-Stokes/Stokes rates, master-equation
// evolution on the truncated ladder, the geometric stationary distribution,
// a Gillespie jump oracle, the ladder energy flux, the exponential
// temperature law, and the Lorentzian cooling-rate law.

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "ringcool/common.hpp"
#include "ringcool/constants.hpp"
#include "ringcool/params.hpp"

namespace ringcool {

// ---------------------------------------------------------------------------
// Rates
// ---------------------------------------------------------------------------

// Gamma_n = n eta_LD (eta_c + 2/5) Gamma_tilde   (anti-Stokes, n -> n-1)
// gamma_n = n eta_LD (xi eta_c + 2/5) Gamma_tilde (Stokes, n-1 -> n)
struct LadderRates {
  double eta_LD = 0.0;
  double eta_c = 0.0;
  double xi = 0.0;
  double gamma_tilde = 0.0;  // 1/s

  double cooling_rate(int n) const {
    if (n < 0) throw std::domain_error("LadderRates: n must be >= 0");
    return n * eta_LD * (eta_c + DerivedRatios::free_space_geometry) * gamma_tilde;
  }
  double heating_rate(int n) const {
    if (n < 0) throw std::domain_error("LadderRates: n must be >= 0");
    return n * eta_LD * (xi * eta_c + DerivedRatios::free_space_geometry) * gamma_tilde;
  }
  // Stationary successive-population ratio Pi_n / Pi_{n-1}, independent of n.
  double branching_ratio() const {
    return (xi * eta_c + DerivedRatios::free_space_geometry) /
           (eta_c + DerivedRatios::free_space_geometry);
  }

  static LadderRates from_ratios(const DerivedRatios& r, double gamma_tilde) {
    return {r.eta_LD, r.eta_c, r.xi, gamma_tilde};
  }
};

inline std::pair<double, double> ladder_rates(int n, const DerivedRatios& ratios,
                                              double gamma_tilde) {
  const LadderRates r = LadderRates::from_ratios(ratios, gamma_tilde);
  return {r.cooling_rate(n), r.heating_rate(n)};
}

// ---------------------------------------------------------------------------
// Ladder state
// ---------------------------------------------------------------------------

inline constexpr int kDefaultLadderSize = 200;
inline constexpr int kMaxLadderSize = 6400;
inline constexpr double kTailMassTolerance = 1e-9;

struct LadderState {
  Eigen::VectorXd populations;  // Pi_0 ... Pi_nmax

  int n_max() const { return static_cast<int>(populations.size()) - 1; }

  double mean_n() const {
    double m = 0.0;
    for (Eigen::Index n = 0; n < populations.size(); ++n) m += double(n) * populations[n];
    return m;
  }
  double ground_fraction() const { return populations[0]; }
  double tail_mass() const { return populations[populations.size() - 1]; }
  double total() const { return populations.sum(); }

  void validate(double tail_tolerance = kTailMassTolerance) const {
    if (populations.size() < 2) throw std::domain_error("LadderState: need n_max >= 1");
    if ((populations.array() < 0.0).any())
      throw std::domain_error("LadderState: negative population");
    if (std::abs(total() - 1.0) > 1e-12)
      throw std::domain_error("LadderState: populations must sum to 1 within 1e-12");
    if (tail_mass() >= tail_tolerance)
      throw TruncationError("LadderState: tail mass exceeds tolerance, increase n_max");
  }
};

inline void write_csv(const LadderState& state, std::ostream& out) {
  out << "n,pi_n\n";
  out.precision(17);
  for (Eigen::Index n = 0; n < state.populations.size(); ++n)
    out << n << ',' << state.populations[n] << '\n';
}

// Closed-form stationary state: geometric with ratio
// r = (xi eta_c + 2/5)/(eta_c + 2/5), truncated and renormalized.
inline LadderState steady_state_distribution(double eta_c, double xi,
                                             int n_max = kDefaultLadderSize) {
  if (eta_c <= 0.0) throw std::domain_error("steady_state_distribution: eta_c must be > 0");
  if (xi <= 0.0 || xi >= 1.0)
    throw std::domain_error("steady_state_distribution: need 0 < xi < 1");
  if (n_max < 1) throw std::domain_error("steady_state_distribution: n_max must be >= 1");
  const double r = (xi * eta_c + DerivedRatios::free_space_geometry) /
                   (eta_c + DerivedRatios::free_space_geometry);
  if (r >= 1.0)
    throw std::logic_error("steady_state_distribution: branching ratio >= 1");
  LadderState s;
  s.populations.resize(n_max + 1);
  double p = 1.0;
  for (int n = 0; n <= n_max; ++n, p *= r) s.populations[n] = p;
  s.populations /= s.populations.sum();
  return s;
}

// Untruncated stationary mean <n> = (eta_c xi + 2/5) / ((1 - xi) eta_c).
inline double mean_n_steady(double eta_c, double xi) {
  if (eta_c <= 0.0 || xi <= 0.0 || xi >= 1.0)
    throw std::domain_error("mean_n_steady: need eta_c > 0 and 0 < xi < 1");
  return (eta_c * xi + DerivedRatios::free_space_geometry) / ((1.0 - xi) * eta_c);
}

// Ground-state population Pi_0 = (1 - xi) eta_c / (eta_c + 2/5).
inline double ground_population_steady(double eta_c, double xi) {
  if (eta_c <= 0.0 || xi <= 0.0 || xi >= 1.0)
    throw std::domain_error("ground_population_steady: need eta_c > 0 and 0 < xi < 1");
  return (1.0 - xi) * eta_c / (eta_c + DerivedRatios::free_space_geometry);
}

// Thermal (geometric) state with the given mean occupation.
inline LadderState thermal_state(double mean_n, int n_max = kDefaultLadderSize) {
  if (mean_n <= 0.0) throw std::domain_error("thermal_state: mean_n must be > 0");
  const double r = mean_n / (1.0 + mean_n);
  LadderState s;
  s.populations.resize(n_max + 1);
  double p = 1.0;
  for (int n = 0; n <= n_max; ++n, p *= r) s.populations[n] = p;
  s.populations /= s.populations.sum();
  return s;
}

// ---------------------------------------------------------------------------
// Master-equation evolution
// ---------------------------------------------------------------------------

// Generator of the truncated birth-death ladder; columns sum to zero, so the
// flow conserves probability exactly (no leak through the top level).
// Works for any rate model exposing cooling_rate(n)/heating_rate(n).
template <class Rates>
Eigen::MatrixXd ladder_generator(const Rates& rates, int n_max) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      a(n - 1, n) += rates.cooling_rate(n);   // n -> n-1
      a(n, n) -= rates.cooling_rate(n);
    }
    if (n < n_max) {
      a(n + 1, n) += rates.heating_rate(n + 1);  // n -> n+1
      a(n, n) -= rates.heating_rate(n + 1);
    }
  }
  return a;
}

enum class LadderStepper { Exact, Rk4 };

struct LadderTrajectory {
  Eigen::VectorXd times;       // s
  Eigen::MatrixXd populations; // one column per sample
  LadderState final() const {
    return {populations.col(populations.cols() - 1)};
  }
};

// Integrates dPi_n/dt = Gamma_{n+1} Pi_{n+1} + gamma_n Pi_{n-1}
//                       - (Gamma_n + gamma_{n+1}) Pi_n on the truncated ladder.
// The ladder is time-invariant, so the default path applies the exact linear
// propagator exp(A dt); the RK4 path enforces dt * max(Gamma_n + gamma_{n+1}) < 0.1.
template <class Rates>
LadderTrajectory evolve_populations(const LadderState& initial,
                                           const Rates& rates, double span, double dt,
                                           LadderStepper stepper = LadderStepper::Exact,
                                           double tail_tolerance = kTailMassTolerance) {
  initial.validate(1.0);  // normalization and positivity; tail checked during evolution
  if (span <= 0.0 || dt <= 0.0)
    throw std::domain_error("evolve_populations: span and dt must be > 0");
  const int n_max = initial.n_max();
  const Eigen::MatrixXd a = ladder_generator(rates, n_max);

  Eigen::MatrixXd propagator;
  if (stepper == LadderStepper::Exact) {
    propagator = (a * dt).exp();
    // exp of a zero-column-sum generator is stochastic; restore the exact
    // column sums lost to floating-point error so normalization cannot drift.
    propagator.array().rowwise() /= propagator.colwise().sum().array();
  } else {
    double max_out = 0.0;
    for (int n = 0; n <= n_max; ++n) max_out = std::max(max_out, -a(n, n));
    if (dt * max_out >= 0.1)
      throw StabilityError("evolve_populations: dt too large for explicit stepper; "
                           "max admissible dt = " + std::to_string(0.1 / max_out) + " s");
  }

  const auto steps = static_cast<Eigen::Index>(std::llround(span / dt));
  LadderTrajectory traj;
  traj.times.resize(steps + 1);
  traj.populations.resize(n_max + 1, steps + 1);
  Eigen::VectorXd pi = initial.populations;
  for (Eigen::Index i = 0; i <= steps; ++i) {
    traj.times[i] = static_cast<double>(i) * dt;
    traj.populations.col(i) = pi;
    if (pi[n_max] >= tail_tolerance)
      throw TruncationError("evolve_populations: tail mass " + std::to_string(pi[n_max]) +
                            " exceeds tolerance; increase n_max (limit " +
                            std::to_string(kMaxLadderSize) + ")");
    if (i == steps) break;
    if (stepper == LadderStepper::Exact) {
      pi = propagator * pi;
    } else {
      const Eigen::VectorXd k1 = a * pi;
      const Eigen::VectorXd k2 = a * (pi + (dt / 2) * k1);
      const Eigen::VectorXd k3 = a * (pi + (dt / 2) * k2);
      const Eigen::VectorXd k4 = a * (pi + dt * k3);
      pi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Gillespie jump oracle
// ---------------------------------------------------------------------------

struct JumpStatistics {
  Eigen::VectorXi terminal_n;  // one entry per trial
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

// Exact stochastic simulation of the (unbounded) birth-death ladder.
// Trials are seeded independently from (seed, trial index) and reproducible.
template <class Rates>
JumpStatistics monte_carlo_ladder(int n0, const Rates& rates, double span,
                                  std::uint64_t seed, int trials) {
  if (n0 < 0) throw std::domain_error("monte_carlo_ladder: n0 must be >= 0");
  if (trials < 1) throw std::domain_error("monte_carlo_ladder: trials must be >= 1");
  if (span <= 0.0) throw std::domain_error("monte_carlo_ladder: span must be > 0");

  JumpStatistics stats;
  stats.terminal_n.resize(trials);
  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    int n = n0;
    double t = 0.0;
    while (true) {
      const double down = rates.cooling_rate(n);
      const double up = rates.heating_rate(n + 1);
      const double total = down + up;
      if (total <= 0.0) break;  // absorbing (only possible if all rates vanish)
      t += -std::log1p(-uniform(rng)) / total;
      if (t > span) break;
      n += (uniform(rng) * total < down) ? -1 : +1;
    }
    stats.terminal_n[trial] = n;
  }
  const Eigen::VectorXd tn = stats.terminal_n.cast<double>();
  stats.mean = tn.mean();
  stats.variance = (tn.array() - stats.mean).square().sum() / std::max(1, trials - 1);
  stats.std_error = std::sqrt(stats.variance / trials);
  return stats;
}

// ---------------------------------------------------------------------------
// Energy flux and temperature laws
// ---------------------------------------------------------------------------

// Ladder energy flux, watts per particle (negative = cooling):
// dW/dt = -hbar omega_V sum_n (Gamma_n - gamma_{n+1}) Pi_n.
template <class Rates>
double energy_flux(const LadderState& state, const Rates& rates, double omega_V) {
  state.validate(1.0);
  if (omega_V <= 0.0) throw std::domain_error("energy_flux: omega_V must be > 0");
  double sum = 0.0;
  for (int n = 0; n <= state.n_max(); ++n)
    sum += (rates.cooling_rate(n) - rates.heating_rate(n + 1)) * state.populations[n];
  return -si::hbar * omega_V * sum;
}

// Cooling rate of the exponential temperature law: 2 (1 - xi) eta_LD eta_c Gamma_tilde.
inline double cooling_rate_classical(const DerivedRatios& ratios, double gamma_tilde) {
  return 2.0 * (1.0 - ratios.xi) * ratios.eta_LD * ratios.eta_c * gamma_tilde;
}

// Fixed point T_inf = (eta_c xi + 2/5) Gamma_tilde T_R / cooling rate.
inline double steady_temperature_classical(const DerivedRatios& ratios, double gamma_tilde,
                                           double recoil_temp) {
  return (ratios.eta_c * ratios.xi + DerivedRatios::free_space_geometry) * gamma_tilde *
         recoil_temp / cooling_rate_classical(ratios, gamma_tilde);
}

struct TemperatureTrace {
  Eigen::VectorXd times;         // s
  Eigen::VectorXd temperatures;  // K
  std::string model;             // eq-of-motion tag
};

inline void write_csv(const TemperatureTrace& trace, std::ostream& out) {
  out << "t,T_kelvin,model\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < trace.times.size(); ++i)
    out << trace.times[i] << ',' << trace.temperatures[i] << ',' << trace.model << '\n';
}

// Closed-form solution of dT/dt = -rate (T - T_inf): exponential approach.
inline TemperatureTrace temperature_evolution(double t0_kelvin, const DerivedRatios& ratios,
                                              double gamma_tilde, double recoil_temp,
                                              double span, int samples = 200,
                                              WarningList* warnings = nullptr) {
  if (t0_kelvin <= 0.0) throw std::domain_error("temperature_evolution: T0 must be > 0");
  if (span <= 0.0 || samples < 2)
    throw std::domain_error("temperature_evolution: need span > 0 and samples >= 2");
  const double rate = cooling_rate_classical(ratios, gamma_tilde);
  const double t_inf = steady_temperature_classical(ratios, gamma_tilde, recoil_temp);
  TemperatureTrace trace;
  trace.model = "classical";
  trace.times.resize(samples);
  trace.temperatures.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = span * static_cast<double>(i) / (samples - 1);
    trace.times[i] = t;
    trace.temperatures[i] = t_inf + (t0_kelvin - t_inf) * std::exp(-rate * t);
  }
  (void)warnings;
  return trace;
}

// Classical-limit validity check, used by callers that know omega_V.
inline void warn_if_quantum_regime(double t0_kelvin, double omega_V,
                                   WarningList* warnings) {
  if (si::k_boltzmann * t0_kelvin < 10.0 * si::hbar * omega_V)
    warn(warnings, "temperature_evolution: k_B T0 < 10 hbar omega_V, classical limit strained");
}

// Cavity line response L(omega) = gamma_c^2 / (gamma_c^2 + (2 N Delta_0 |g| + omega)^2).
inline double lorentzian_response(double omega, double n_delta0_g, double gamma_c) {
  if (gamma_c <= 0.0) throw std::domain_error("lorentzian_response: gamma_c must be > 0");
  const double d = 2.0 * n_delta0_g + omega;
  return gamma_c * gamma_c / (gamma_c * gamma_c + d * d);
}

// Detuning-resolved temperature decay rate:
// 2 eta_c eta_LD Gamma_tilde (L(omega_V) - L(-omega_V)).
// At resonance omega_V = -2 N Delta_0 |g| the bracket equals 1 - xi.
inline double lorentzian_cooling_rate(double omega_V, double n_delta0_g, double gamma_c,
                                      const DerivedRatios& ratios, double gamma_tilde) {
  const double bracket = lorentzian_response(omega_V, n_delta0_g, gamma_c) -
                         lorentzian_response(-omega_V, n_delta0_g, gamma_c);
  return 2.0 * ratios.eta_c * ratios.eta_LD * gamma_tilde * bracket;
}

// ---------------------------------------------------------------------------
// Temperature-equivalent reporting
// ---------------------------------------------------------------------------

// Adopted reporting convention: k_B T = hbar omega_V <n>.
inline double temperature_report(double mean_n, double omega_V) {
  return si::hbar * omega_V * mean_n / si::k_boltzmann;
}

// Labeled alternatives, never silently substituted for the adopted convention.
inline double temperature_with_zero_point(double mean_n, double omega_V) {
  return si::hbar * omega_V * (mean_n + 0.5) / si::k_boltzmann;
}
inline double temperature_boltzmann_fit(double mean_n, double omega_V) {
  // k_B T from <n> = 1/(exp(hbar w / k_B T) - 1).
  if (mean_n <= 0.0) throw std::domain_error("temperature_boltzmann_fit: mean_n must be > 0");
  return si::hbar * omega_V / (si::k_boltzmann * std::log(1.0 + 1.0 / mean_n));
}

}  // namespace ringcool
