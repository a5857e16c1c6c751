#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mwshape/grid.hpp"
#include "mwshape/spectral.hpp"

namespace mwshape {

/// Complex amplitudes (um^-1/2) on a grid at a given time.
///
/// Amplitudes may be stored in a Galilean frame moving at
/// `frame_velocity_cm_s` whose origin coincided with the lab origin at t = 0:
/// grid point x then sits at lab position x + u*t and lab wavenumbers are
/// shifted by m*u/hbar. Observables are always reported in the lab frame.
struct WaveFunction {
  Grid1D grid;
  std::vector<cplx> amplitudes;
  double time = 0.0;                 // us
  double frame_velocity_cm_s = 0.0;  // cm/s

  WaveFunction(Grid1D g, std::vector<cplx> amps, double t = 0.0, double frame_u = 0.0);
  explicit WaveFunction(Grid1D g);

  /// Integral of |psi|^2 dx.
  double norm() const;
  std::vector<double> density() const;
  void normalize();

  /// Lab-frame position of grid point i at the current time.
  double lab_position(std::size_t i) const;
  /// Lab-frame offset of the whole frame at the current time (um).
  double frame_offset() const;
};

/// Moments of a state, lab frame.
struct Observables {
  double time = 0.0;            // us
  double norm = 0.0;
  double mean_x = 0.0;          // um
  double width_dx = 0.0;        // um, sqrt(<x^2> - <x>^2)
  double mean_p = 0.0;          // momentum as velocity, cm/s
  double width_p = 0.0;         // momentum spread as velocity, cm/s
  double kinetic_energy = 0.0;  // uK, <p^2>/2m per particle
  /// |psi~(k)|^2 / 2pi in grid wavenumber order; integrates (sum * dk) to norm.
  std::vector<double> momentum_density;
};

/// Computes observables; moments of p and the kinetic energy are spectral.
/// Throws DomainError for zero norm.
Observables observables(const WaveFunction& wf, bool with_momentum_density = true);

/// Same, reusing a caller-owned transform of matching size.
Observables observables(const WaveFunction& wf, SpectralTransform& workspace,
                        bool with_momentum_density);

/// Normalized Gaussian packet psi = (sigma sqrt(pi))^-1/2 exp(-(x-x0)^2/2sigma^2 + i k0 (x-x0))
/// with sigma from the amplitude FWHM and k0 = m v/hbar. Requires a 5 sigma
/// margin to both grid edges.
WaveFunction gaussian_packet(const Grid1D& grid, double fwhm_amplitude_um, double v_cm_s,
                             double x0_um, double frame_velocity_cm_s = 0.0);

/// Re-expresses a lab-frame state in a Galilean frame moving at u (valid at t = 0).
WaveFunction to_frame(const WaveFunction& lab, double frame_velocity_cm_s);

}  // namespace mwshape
