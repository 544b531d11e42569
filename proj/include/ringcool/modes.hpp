#pragma once

// Coupled-mode dynamics of the bidirectionally pumped ring cavity: the 2x2
// complex mode matrix, analytic carrier and sideband steady states, time
// integration (exact propagator for constant localization, RK4 otherwise),
// sideband demodulation, the per-particle energy flux carried by the
// modulation sidebands, and the splitting-resonance conditions.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <ostream>
#include <utility>

#include "ringcool/common.hpp"
#include "ringcool/constants.hpp"
#include "ringcool/params.hpp"

namespace ringcool {

// ---------------------------------------------------------------------------
// Mode matrix
// ---------------------------------------------------------------------------

// M = [ i(delta_c - N Delta_0) - gamma_c        -i N Delta_0 g      ]
//     [ -i N Delta_0 g*                i(delta_c - N Delta_0) - gamma_c ]
//
// Both eigenvalues have real part exactly -gamma_c; the imaginary parts are
// delta_c - N Delta_0 (1 -+ |g|), split by 2 N |Delta_0| |g|.
class ModeMatrix {
 public:
  ModeMatrix(double delta_c, double n_delta0, Complex g, double gamma_c)
      : delta_c_(delta_c), n_delta0_(n_delta0), g_(g), gamma_c_(gamma_c) {
    if (gamma_c <= 0.0) throw std::domain_error("ModeMatrix: gamma_c must be > 0");
    if (std::abs(g) > 1.0 + 1e-12)
      throw std::domain_error("ModeMatrix: |g| must lie in the closed unit disk");
    const Complex diag{-gamma_c, delta_c - n_delta0};
    const Complex coupling = Complex{0.0, -n_delta0};
    m_ << diag, coupling * g, coupling * std::conj(g), diag;
  }

  const Eigen::Matrix2cd& matrix() const { return m_; }

  double delta_c() const { return delta_c_; }
  double n_delta0() const { return n_delta0_; }
  Complex g() const { return g_; }
  double gamma_c() const { return gamma_c_; }

  // Pumped (lattice) eigenmode, shifted by N Delta_0 (1 + |g|).
  Complex eigenvalue_pumped() const {
    return Complex{-gamma_c_, delta_c_ - n_delta0_ * (1.0 + std::abs(g_))};
  }
  // Orthogonal standing-wave eigenmode, shifted by N Delta_0 (1 - |g|).
  Complex eigenvalue_orthogonal() const {
    return Complex{-gamma_c_, delta_c_ - n_delta0_ * (1.0 - std::abs(g_))};
  }
  // Resonance doublet separation 2 N |Delta_0| |g|.
  double splitting() const { return 2.0 * std::abs(n_delta0_) * std::abs(g_); }

 private:
  double delta_c_;
  double n_delta0_;
  Complex g_;
  double gamma_c_;
  Eigen::Matrix2cd m_;
};

inline ModeMatrix build_mode_matrix(double delta_c, double n_delta0, Complex g,
                                    double gamma_c) {
  return ModeMatrix(delta_c, n_delta0, g, gamma_c);
}

// ---------------------------------------------------------------------------
// Field states
// ---------------------------------------------------------------------------

// Traveling-wave amplitudes in field-per-photon units:
// |alpha|^2 = intracavity photon number per traveling wave.
struct FieldState {
  Complex alpha_plus{0.0, 0.0};
  Complex alpha_minus{0.0, 0.0};
};

// Scalars shared by both modes; gamma_0 = c/L in 1/s (see params.hpp note).
struct CoupledModeSystem {
  double delta_c = 0.0;   // rad/s
  double n_delta0 = 0.0;  // rad/s, N * Delta_0
  double gamma_c = 0.0;   // rad/s
  double gamma_0 = 0.0;   // 1/s

  ModeMatrix mode_matrix(Complex g) const {
    return ModeMatrix(delta_c, n_delta0, g, gamma_c);
  }
};

struct FieldTimeSeries {
  Eigen::VectorXd times;          // s, uniform grid starting at 0
  Eigen::VectorXcd alpha_plus;
  Eigen::VectorXcd alpha_minus;
  double dt = 0.0;
  std::string g_description;
};

inline void write_csv(const FieldTimeSeries& series, std::ostream& out) {
  out << "t,re_ap,im_ap,re_am,im_am\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < series.times.size(); ++i) {
    out << series.times[i] << ',' << series.alpha_plus[i].real() << ','
        << series.alpha_plus[i].imag() << ',' << series.alpha_minus[i].real() << ','
        << series.alpha_minus[i].imag() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Analytic steady states
// ---------------------------------------------------------------------------

// Carrier steady state under symmetric pumping:
// alpha = gamma_0 eta / (gamma_c - i(delta_c - N Delta_0 (1 + |g|))).
inline Complex steady_state_carrier(double gamma_c, double delta_c, double gamma_0,
                                    double n_delta0, double g_mod, Complex eta) {
  if (gamma_c <= 0.0) throw std::domain_error("steady_state_carrier: gamma_c must be > 0");
  return gamma_0 * eta / Complex{gamma_c, -(delta_c - n_delta0 * (1.0 + g_mod))};
}

inline Complex steady_state_carrier(const CoupledModeSystem& sys, double g_mod,
                                    Complex eta) {
  return steady_state_carrier(sys.gamma_c, sys.delta_c, sys.gamma_0, sys.n_delta0, g_mod,
                              eta);
}

struct SidebandPair {
  Complex beta;   // coefficient of exp(-i Omega t)
  Complex gamma;  // coefficient of exp(+i Omega t)
};

// Small-signal sideband amplitudes for center-of-mass modulation depth
// epsilon = 2 k z_cm0:
//   beta(Omega)  = alpha N Delta_0 eps / (gamma_c - i(delta_c + Omega - N Delta_0 (1-|g|)))
//   gamma(Omega) = same with Omega -> -Omega.
inline SidebandPair sideband_amplitudes(Complex alpha, double n_delta0, double epsilon,
                                        double delta_c, double omega, double g_mod,
                                        double gamma_c, WarningList* warnings = nullptr) {
  if (epsilon < 0.0) throw std::domain_error("sideband_amplitudes: epsilon must be >= 0");
  if (gamma_c <= 0.0) throw std::domain_error("sideband_amplitudes: gamma_c must be > 0");
  if (epsilon > 0.1)
    warn(warnings, "sideband_amplitudes: epsilon > 0.1, linearized ansatz degrades");
  const Complex numerator = alpha * n_delta0 * epsilon;
  const double shifted = n_delta0 * (1.0 - g_mod);
  SidebandPair out;
  out.beta = numerator / Complex{gamma_c, -(delta_c + omega - shifted)};
  out.gamma = numerator / Complex{gamma_c, -(delta_c - omega - shifted)};
  return out;
}

// Carrier-resonant detuning and sideband-resonant modulation frequency:
// delta_c* = N Delta_0 (1 + |g|), Omega* = -2 N Delta_0 |g|.
struct SplittingResonance {
  double delta_c_star;  // rad/s
  double omega_star;    // rad/s
};

inline SplittingResonance find_splitting_resonance(double n_delta0, double g_mod) {
  if (n_delta0 >= 0.0)
    throw std::domain_error("find_splitting_resonance: need N Delta_0 < 0 (normal dispersion)");
  if (g_mod <= 0.0 || g_mod > 1.0)
    throw std::domain_error("find_splitting_resonance: need 0 < |g| <= 1");
  return {n_delta0 * (1.0 + g_mod), -2.0 * n_delta0 * g_mod};
}

// ---------------------------------------------------------------------------
// Time integration
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::Vector2cd mode_rhs(const CoupledModeSystem& sys, Complex g,
                                 const Eigen::Vector2cd& v, const Eigen::Vector2cd& pump) {
  const Complex diag{-sys.gamma_c, sys.delta_c - sys.n_delta0};
  const Complex coupling{0.0, -sys.n_delta0};
  Eigen::Vector2cd dv;
  dv[0] = diag * v[0] + coupling * g * v[1];
  dv[1] = coupling * std::conj(g) * v[0] + diag * v[1];
  return dv + sys.gamma_0 * pump;
}

inline Eigen::Index sample_count(double span, double dt) {
  return static_cast<Eigen::Index>(std::llround(span / dt)) + 1;
}

}  // namespace detail

// Constant-g evolution: the system is linear time-invariant, so the exact
// matrix-exponential propagator is used; no stability restriction on dt.
inline FieldTimeSeries integrate_modes(const CoupledModeSystem& sys, FieldState initial,
                                       std::pair<Complex, Complex> pump, Complex g,
                                       double span, double dt) {
  if (dt <= 0.0 || span <= 0.0)
    throw std::domain_error("integrate_modes: span and dt must be > 0");
  const ModeMatrix mm = sys.mode_matrix(g);
  const Eigen::Vector2cd drive{sys.gamma_0 * pump.first, sys.gamma_0 * pump.second};
  // Fixed point M x = -drive; M is never singular (Re lambda = -gamma_c < 0).
  const Eigen::Vector2cd x_ss = mm.matrix().fullPivLu().solve(-drive);

  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(mm.matrix());
  const Eigen::Matrix2cd v = es.eigenvectors();
  const Eigen::Vector2cd lam = es.eigenvalues();
  Eigen::Matrix2cd propagator =
      v * Eigen::Vector2cd(std::exp(lam[0] * dt), std::exp(lam[1] * dt)).asDiagonal() *
      v.inverse();

  const Eigen::Index n = detail::sample_count(span, dt);
  FieldTimeSeries series;
  series.dt = dt;
  series.g_description = "constant";
  series.times.resize(n);
  series.alpha_plus.resize(n);
  series.alpha_minus.resize(n);
  Eigen::Vector2cd x{initial.alpha_plus, initial.alpha_minus};
  for (Eigen::Index i = 0; i < n; ++i) {
    series.times[i] = static_cast<double>(i) * dt;
    series.alpha_plus[i] = x[0];
    series.alpha_minus[i] = x[1];
    x = x_ss + (propagator * (x - x_ss)).eval();
  }
  return series;
}

// Time-dependent g: classic RK4 with a hard stability guard
// dt * max|eigenvalue| < 0.1 (the bound samples |g(t)| across the span).
inline FieldTimeSeries integrate_modes(const CoupledModeSystem& sys, FieldState initial,
                                       std::pair<Complex, Complex> pump,
                                       const std::function<Complex(double)>& g_of_t,
                                       double span, double dt) {
  if (dt <= 0.0 || span <= 0.0)
    throw std::domain_error("integrate_modes: span and dt must be > 0");

  double g_sup = 0.0;
  for (int i = 0; i <= 1000; ++i)
    g_sup = std::max(g_sup, std::abs(g_of_t(span * static_cast<double>(i) / 1000.0)));
  const double offdiag = std::abs(sys.n_delta0) * std::max(1.0, g_sup);
  const double eig_bound =
      std::hypot(sys.gamma_c, std::abs(sys.delta_c - sys.n_delta0)) + offdiag;
  if (dt * eig_bound >= 0.1)
    throw StabilityError("integrate_modes: dt too large for explicit stepper; max admissible dt = " +
                         std::to_string(0.1 / eig_bound) + " s");

  const Eigen::Vector2cd pump_vec{pump.first, pump.second};
  const Eigen::Index n = detail::sample_count(span, dt);
  FieldTimeSeries series;
  series.dt = dt;
  series.g_description = "time-dependent";
  series.times.resize(n);
  series.alpha_plus.resize(n);
  series.alpha_minus.resize(n);
  Eigen::Vector2cd x{initial.alpha_plus, initial.alpha_minus};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    series.times[i] = t;
    series.alpha_plus[i] = x[0];
    series.alpha_minus[i] = x[1];
    const Eigen::Vector2cd k1 = detail::mode_rhs(sys, g_of_t(t), x, pump_vec);
    const Eigen::Vector2cd k2 =
        detail::mode_rhs(sys, g_of_t(t + dt / 2), x + (dt / 2) * k1, pump_vec);
    const Eigen::Vector2cd k3 =
        detail::mode_rhs(sys, g_of_t(t + dt / 2), x + (dt / 2) * k2, pump_vec);
    const Eigen::Vector2cd k4 = detail::mode_rhs(sys, g_of_t(t + dt), x + dt * k3, pump_vec);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return series;
}

// Center-of-mass modulation trajectory with localization modulus g_mod and
// depth epsilon = 2 k z_cm0, normalized so that the small-signal response of
// the coupled-mode equations equals sideband_amplitudes exactly to first
// order in epsilon.
inline std::function<Complex(double)> modulated_localization(double g_mod, double epsilon,
                                                             double omega) {
  if (g_mod < 0.0 || g_mod > 1.0)
    throw std::domain_error("modulated_localization: need 0 <= |g| <= 1");
  return [g_mod, epsilon, omega](double t) {
    return Complex{g_mod, 2.0 * epsilon * std::cos(omega * t)};
  };
}

// ---------------------------------------------------------------------------
// Demodulation
// ---------------------------------------------------------------------------

struct Demodulation {
  Complex carrier;
  Complex beta;   // coefficient of exp(-i Omega t)
  Complex gamma;  // coefficient of exp(+i Omega t)
};

// Least-squares projection of alpha_+(t) onto {1, e^{-i Omega t}, e^{+i Omega t}}
// over an integer number of modulation periods after discarding the transient.
inline Demodulation demodulate_sidebands(const FieldTimeSeries& series, double omega,
                                         double transient) {
  if (omega <= 0.0) throw std::domain_error("demodulate_sidebands: omega must be > 0");
  if (transient < 0.0) throw std::domain_error("demodulate_sidebands: transient must be >= 0");
  const double period = 2.0 * si::pi / omega;
  const double t_end = series.times[series.times.size() - 1];
  const double available = t_end - transient;
  const double n_periods = std::floor(available / period);
  if (n_periods < 20.0)
    throw std::domain_error(
        "demodulate_sidebands: series spans fewer than 20 modulation periods after transient");

  const double t0 = transient;
  const double t1 = transient + n_periods * period;
  Eigen::Matrix3cd normal = Eigen::Matrix3cd::Zero();
  Eigen::Vector3cd rhs = Eigen::Vector3cd::Zero();
  for (Eigen::Index i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < t0 || t > t1) continue;
    const Eigen::Vector3cd basis{Complex{1.0, 0.0}, std::exp(Complex{0.0, -omega * t}),
                                 std::exp(Complex{0.0, omega * t})};
    normal += basis.conjugate() * basis.transpose();
    rhs += basis.conjugate() * series.alpha_plus[i];
  }
  const Eigen::Vector3cd sol = normal.fullPivLu().solve(rhs);
  return {sol[0], sol[1], sol[2]};
}

// ---------------------------------------------------------------------------
// Energy flux carried by the sidebands
// ---------------------------------------------------------------------------

// Per-particle kinetic-energy change rate (W, negative = cooling):
//   dW/dt = -(2/N) (Omega/omega_L) T_loss (P_beta - P_gamma),
// with traveling-wave power P = hbar omega_L |a|^2 gamma_0 and round-trip
// loss T_loss = 2 gamma_c / gamma_0 (gamma_0 cancels).
inline double sideband_power_flux(Complex beta, Complex gamma, double omega,
                                  double omega_L, double gamma_c, double gamma_0,
                                  double n_atoms) {
  if (n_atoms < 1.0) throw std::domain_error("sideband_power_flux: N must be >= 1");
  if (omega <= 0.0 || omega_L <= 0.0)
    throw std::domain_error("sideband_power_flux: Omega and omega_L must be > 0");
  const double p_beta = si::hbar * omega_L * std::norm(beta) * gamma_0;
  const double p_gamma = si::hbar * omega_L * std::norm(gamma) * gamma_0;
  const double t_loss = 2.0 * gamma_c / gamma_0;
  return -(2.0 / n_atoms) * (omega / omega_L) * t_loss * (p_beta - p_gamma);
}

// Carrier photon number per traveling wave expressed through the free-space
// scattering rate: |alpha|^2 = eta_c gamma_c Gamma_tilde / (32 Delta_0^2).
// This is the power/scattering bookkeeping under which the sideband-flux
// pipeline reduces exactly to the Lorentzian cooling-rate law.
inline double carrier_photons_for_scattering_rate(double eta_c, double gamma_c,
                                                  double gamma_tilde, double delta_0) {
  if (eta_c <= 0.0 || gamma_c <= 0.0 || gamma_tilde <= 0.0 || delta_0 == 0.0)
    throw std::domain_error("carrier_photons_for_scattering_rate: invalid inputs");
  return eta_c * gamma_c * gamma_tilde / (32.0 * delta_0 * delta_0);
}

// Temperature decay rate obtained by pushing a thermal ensemble at
// temperature T through the full field pipeline: carrier steady state ->
// sideband amplitudes -> sideband power flux.  gamma_0-independent.
inline double pipeline_cooling_rate(double omega_V, double n_delta0, double g_mod,
                                    double gamma_c, double eta_c, double gamma_tilde,
                                    double delta_0, double wavenumber, double mass,
                                    double n_atoms, double omega_L, double temperature) {
  if (temperature <= 0.0)
    throw std::domain_error("pipeline_cooling_rate: temperature must be > 0");
  const double photons =
      carrier_photons_for_scattering_rate(eta_c, gamma_c, gamma_tilde, delta_0);
  const Complex alpha{std::sqrt(photons), 0.0};
  const double delta_c = n_delta0 * (1.0 + g_mod);  // carrier resonance
  // k_B T = m dz_rms^2 omega_V^2 and epsilon^2 = 4 k^2 dz_rms^2 / N.
  const double dz2 = si::k_boltzmann * temperature / (mass * omega_V * omega_V);
  const double epsilon = std::sqrt(4.0 * wavenumber * wavenumber * dz2 / n_atoms);
  const SidebandPair sb =
      sideband_amplitudes(alpha, n_delta0, epsilon, delta_c, omega_V, g_mod, gamma_c);
  const double gamma_0 = 1.0;  // cancels
  const double flux =
      sideband_power_flux(sb.beta, sb.gamma, omega_V, omega_L, gamma_c, gamma_0, n_atoms);
  // k_B T = 2 W  =>  dT/dt = (2/k_B) dW/dt; return the decay rate -dT/dt / T.
  return -2.0 * flux / (si::k_boltzmann * temperature);
}

}  // namespace ringcool
