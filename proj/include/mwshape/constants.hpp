#pragma once

#include <cmath>
#include <numbers>

namespace mwshape {

/// SI physical constants (CODATA 2018) for a single 87Rb atom.
struct Constants {
  static constexpr double hbar = 1.054571817e-34;        // J s
  static constexpr double kB = 1.380649e-23;             // J/K
  static constexpr double amu = 1.66053906660e-27;       // kg
  static constexpr double mRb = 86.909180527 * amu;      // kg
  static constexpr double a0 = 5.29177210903e-11;        // m
  static constexpr double a_s = 95.5 * a0;               // m, 87Rb |2,2>
};

/// Internal unit system: lengths in um, times in us, energies as angular
/// frequency in rad/us. Interfaces speak uK, um, us and cm/s.
namespace units {

/// hbar/m in um^2/us.
inline constexpr double hbar_over_m = Constants::hbar / Constants::mRb * 1e6;

/// 1 uK expressed as E/hbar in rad/us (~0.1309).
inline constexpr double rad_per_us_per_uK = Constants::kB * 1e-6 / Constants::hbar * 1e-6;

/// s-wave scattering length in um.
inline constexpr double scattering_length_um = Constants::a_s * 1e6;

constexpr double uK_to_internal(double uK) { return uK * rad_per_us_per_uK; }
constexpr double internal_to_uK(double w) { return w / rad_per_us_per_uK; }

/// 1 cm/s = 0.01 um/us.
constexpr double cm_s_to_um_us(double v) { return v * 1e-2; }
constexpr double um_us_to_cm_s(double v) { return v * 1e2; }

/// Wavenumber (rad/um) of an atom moving at v (cm/s).
constexpr double velocity_to_wavenumber(double v_cm_s) {
  return cm_s_to_um_us(v_cm_s) / hbar_over_m;
}
constexpr double wavenumber_to_velocity(double k) {
  return um_us_to_cm_s(k * hbar_over_m);
}

/// Angular frequency in rad/s -> rad/us.
constexpr double per_s_to_per_us(double w) { return w * 1e-6; }

/// Number density: atoms/cm^3 -> atoms/um^3.
constexpr double per_cm3_to_per_um3(double n) { return n * 1e-12; }
constexpr double per_um3_to_per_cm3(double n) { return n * 1e12; }

/// Amplitude FWHM of a Gaussian exp(-x^2/(2 sigma^2)) -> sigma.
inline double fwhm_to_sigma(double fwhm) {
  return fwhm / (2.0 * std::numbers::sqrt2 * std::sqrt(std::numbers::ln2));
}

}  // namespace units
}  // namespace mwshape
