#pragma once

// Physical inputs of the ring-cavity cooling model and every derived
// dimensionless or rate quantity, including the complex localization
// parameter g of the trapped ensemble.
//
// Convention: all optical/mechanical frequencies, detunings, linewidths and
// decay rates are ANGULAR frequencies (rad/s). The single exception is the
// free spectral range gamma_0 = c/L, kept in 1/s exactly as it enters the
// drive prefactor and the round-trip loss bookkeeping T_loss = 2*gamma_c/gamma_0.

#include <Eigen/Core>
#include <cmath>
#include <random>
#include <span>

#include "ringcool/common.hpp"
#include "ringcool/constants.hpp"

namespace ringcool {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Geometry and loss of the ring cavity.
struct CavityParams {
  double finesse = 0.0;           // dimensionless
  double waist = 0.0;             // m, e^-2 intensity radius
  double roundtrip_length = 0.0;  // m
  double gamma_c = 0.0;           // rad/s, intra-cavity field decay rate
  double delta_c = 0.0;           // rad/s, pump detuning from empty-cavity resonance

  double free_spectral_range() const { return si::speed_of_light / roundtrip_length; }  // 1/s

  void validate() const {
    if (finesse <= 0.0) throw std::domain_error("CavityParams: finesse must be > 0");
    if (waist <= 0.0) throw std::domain_error("CavityParams: waist must be > 0");
    if (roundtrip_length <= 0.0)
      throw std::domain_error("CavityParams: roundtrip_length must be > 0");
    if (gamma_c <= 0.0) throw std::domain_error("CavityParams: gamma_c must be > 0");
  }
};

// Atomic species and lattice-drive parameters.
struct SpeciesDrive {
  double mass = 0.0;                   // kg
  double transition_wavelength = 0.0;  // m
  double linewidth = 0.0;              // rad/s, natural linewidth Gamma
  double lattice_wavelength = 0.0;     // m
  double circulating_power = 0.0;      // W per propagation direction
  double trap_depth = 0.0;             // J
  double lightshift_per_photon = 0.0;  // rad/s, Delta_0, < 0 for normal dispersion
  double atom_number = 0.0;            // dimensionless; 0 = to be solved

  double wavenumber() const { return 2.0 * si::pi / lattice_wavelength; }  // rad/m
  double lattice_omega() const {
    return 2.0 * si::pi * si::speed_of_light / lattice_wavelength;  // rad/s
  }
  // Lattice detuning from the atomic transition, rad/s; negative = red.
  double delta_at() const {
    return 2.0 * si::pi * si::speed_of_light *
           (1.0 / lattice_wavelength - 1.0 / transition_wavelength);
  }

  void validate() const {
    if (mass <= 0.0) throw std::domain_error("SpeciesDrive: mass must be > 0");
    if (transition_wavelength <= 0.0)
      throw std::domain_error("SpeciesDrive: transition_wavelength must be > 0");
    if (lattice_wavelength <= 0.0)
      throw std::domain_error("SpeciesDrive: lattice_wavelength must be > 0");
    if (linewidth <= 0.0) throw std::domain_error("SpeciesDrive: linewidth must be > 0");
    if (trap_depth <= 0.0) throw std::domain_error("SpeciesDrive: trap_depth must be > 0");
    if (lightshift_per_photon >= 0.0)
      throw std::domain_error(
          "SpeciesDrive: lightshift_per_photon must be < 0 (normal dispersion)");
    if (atom_number < 0.0) throw std::domain_error("SpeciesDrive: atom_number must be >= 0");
  }
};

// Dimensionless ratios governing the cooling kinetics.
struct DerivedRatios {
  double eta_c = 0.0;   // cavity-to-free-space scattering ratio
  double eta_LD = 0.0;  // Lamb-Dicke parameter omega_R/omega_V
  double xi = 0.0;      // Stokes suppression by the cavity line

  // Angular weight of free-space scattering that changes the motional state.
  static constexpr double free_space_geometry = 2.0 / 5.0;
};

// ---------------------------------------------------------------------------
// Derived-quantity operations
// ---------------------------------------------------------------------------

// eta_c = 12 F / (pi (k w0)^2), k = 2 pi / lambda_L.
inline double eta_c(double finesse, double waist, double lattice_wavelength) {
  if (finesse <= 0.0 || waist <= 0.0 || lattice_wavelength <= 0.0)
    throw std::domain_error("eta_c: all inputs must be > 0");
  const double kw0 = 2.0 * si::pi * waist / lattice_wavelength;
  return 12.0 * finesse / (si::pi * kw0 * kw0);
}

// omega_R = hbar k^2 / (2 m), k = 2 pi / lambda_L.
inline double recoil_frequency(double mass, double lattice_wavelength) {
  if (mass <= 0.0 || lattice_wavelength <= 0.0)
    throw std::domain_error("recoil_frequency: all inputs must be > 0");
  const double k = 2.0 * si::pi / lattice_wavelength;
  return si::hbar * k * k / (2.0 * mass);
}

// Recoil temperature convention: T_R = hbar omega_R / k_B.
inline double recoil_temperature(double omega_R) {
  if (omega_R <= 0.0) throw std::domain_error("recoil_temperature: omega_R must be > 0");
  return si::hbar * omega_R / si::k_boltzmann;
}

// eta_LD = omega_R / omega_V. Warns when the Lamb-Dicke condition
// omega_V >> omega_R is not comfortably met.
inline double lamb_dicke(double omega_R, double omega_V, WarningList* warnings = nullptr) {
  if (omega_R <= 0.0 || omega_V <= 0.0)
    throw std::domain_error("lamb_dicke: all inputs must be > 0");
  if (omega_V <= 10.0 * omega_R)
    warn(warnings, "lamb_dicke: omega_V <= 10*omega_R, Lamb-Dicke regime not satisfied");
  return omega_R / omega_V;
}

// xi = (1 + (2 omega_V / gamma_c)^2)^-1, in (0, 1].
inline double xi_suppression(double omega_V, double gamma_c) {
  if (gamma_c <= 0.0) throw std::domain_error("xi_suppression: gamma_c must be > 0");
  if (omega_V < 0.0) throw std::domain_error("xi_suppression: omega_V must be >= 0");
  const double x = 2.0 * omega_V / gamma_c;
  return 1.0 / (1.0 + x * x);
}

// Harmonic expansion of the standing-wave well: omega_V = 2 sqrt(U E_R)/hbar
// with E_R = hbar omega_R.
inline double trap_frequency_from_depth(double depth, double omega_R) {
  if (depth <= 0.0 || omega_R <= 0.0)
    throw std::domain_error("trap_frequency_from_depth: all inputs must be > 0");
  return 2.0 * std::sqrt(depth * omega_R / si::hbar);
}

inline double depth_from_trap_frequency(double omega_V, double omega_R) {
  if (omega_V <= 0.0 || omega_R <= 0.0)
    throw std::domain_error("depth_from_trap_frequency: all inputs must be > 0");
  return si::hbar * omega_V * omega_V / (4.0 * omega_R);
}

// Large-detuning two-level estimate: Gamma_tilde = (Gamma/|delta_at|) U/hbar.
inline double free_space_scattering_rate(double depth, double linewidth, double delta_at,
                                         WarningList* warnings = nullptr) {
  if (depth <= 0.0 || linewidth <= 0.0)
    throw std::domain_error("free_space_scattering_rate: depth and linewidth must be > 0");
  if (delta_at == 0.0)
    throw std::domain_error("free_space_scattering_rate: resonant drive (delta_at = 0)");
  if (std::abs(delta_at) < 100.0 * linewidth)
    warn(warnings,
         "free_space_scattering_rate: |delta_at| not >> Gamma, two-level estimate degrades");
  return (linewidth / std::abs(delta_at)) * depth / si::hbar;
}

// ---------------------------------------------------------------------------
// Localization parameter g
// ---------------------------------------------------------------------------

// g = (1/N) sum_nu exp(-i 2 k z_nu); always inside the closed unit disk.
inline Complex localization_exact(std::span<const double> positions, double k) {
  if (positions.empty()) throw std::domain_error("localization_exact: empty position list");
  Complex sum{0.0, 0.0};
  for (double z : positions) sum += std::exp(Complex{0.0, -2.0 * k * z});
  return sum / static_cast<double>(positions.size());
}

// Gaussian closed form: g = exp(-2 k^2 dz_rms^2) exp(-2 i k z_cm).
inline Complex localization_gaussian(double dz_rms, double z_cm, double k) {
  if (dz_rms < 0.0) throw std::domain_error("localization_gaussian: dz_rms must be >= 0");
  const double modulus = std::exp(-2.0 * k * k * dz_rms * dz_rms);
  return modulus * std::exp(Complex{0.0, -2.0 * k * z_cm});
}

// Invert |g| = exp(-2 k^2 dz_rms^2) for the position spread.
inline double spread_from_localization(double g_mod, double k) {
  if (g_mod <= 0.0 || g_mod > 1.0)
    throw std::domain_error("spread_from_localization: need 0 < |g| <= 1");
  return std::sqrt(-std::log(g_mod) / (2.0 * k * k));
}

// Seeded Gaussian position sample; no hidden global randomness.
inline Eigen::VectorXd sample_gaussian_positions(Eigen::Index n, double dz_rms, double z_cm,
                                                 std::uint64_t seed) {
  if (n <= 0) throw std::domain_error("sample_gaussian_positions: n must be > 0");
  if (dz_rms < 0.0) throw std::domain_error("sample_gaussian_positions: dz_rms must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(z_cm, dz_rms);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = dist(rng);
  return z;
}

// Atomic localization, either explicit positions or a Gaussian summary.
struct EnsembleState {
  Complex g{0.0, 0.0};       // derived localization parameter
  double epsilon = 0.0;      // 2 k z_cm0, center-of-mass oscillation amplitude

  static EnsembleState from_positions(std::span<const double> positions, double k,
                                      double epsilon = 0.0) {
    EnsembleState s;
    s.g = localization_exact(positions, k);
    s.epsilon = epsilon;
    return s;
  }

  static EnsembleState from_gaussian(double dz_rms, double z_cm, double k,
                                     double epsilon = 0.0) {
    EnsembleState s;
    s.g = localization_gaussian(dz_rms, z_cm, k);
    s.epsilon = epsilon;
    return s;
  }

  static EnsembleState from_modulus(double g_mod, double epsilon = 0.0) {
    if (g_mod < 0.0 || g_mod > 1.0)
      throw std::domain_error("EnsembleState: need 0 <= |g| <= 1");
    EnsembleState s;
    s.g = Complex{g_mod, 0.0};
    s.epsilon = epsilon;
    return s;
  }

  double g_mod() const { return std::abs(g); }
};

}  // namespace ringcool
