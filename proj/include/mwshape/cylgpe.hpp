#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mwshape/potentials.hpp"
#include "mwshape/wavefunction.hpp"

namespace mwshape {

/// Longitudinal grid times a radial grid at r_j = (j + 1/2) dr, j < n_r.
struct CylGrid {
  Grid1D x;
  std::size_t n_r = 128;
  double dr = 0.0;     // um
  double r_max = 0.0;  // um

  CylGrid(Grid1D longitudinal, std::size_t radial_points, double r_max_um);
  /// r_max = extent * sqrt(hbar/(m omega)).
  static CylGrid for_trap(Grid1D longitudinal, double omega_rad_s, std::size_t radial_points = 128,
                          double extent = 6.0);

  double r(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dr; }
  std::size_t size() const { return x.size() * n_r; }
};

/// Amplitudes stored radial-major: amplitudes[j * n_x + i] = Psi(x_i, r_j).
/// Normalized as 2 pi sum |Psi|^2 r dr dx = 1.
struct CylState {
  CylGrid grid;
  std::vector<cplx> amplitudes;
  double omega = 0.0;       // transverse trap, rad/s
  double atom_count = 0.0;  // N; 0 gives the linear equation
  double time = 0.0;        // us
  double frame_velocity_cm_s = 0.0;

  double norm() const;
  double frame_offset() const;
  /// n(x) = 2 pi int |Psi|^2 r dr, per um.
  std::vector<double> longitudinal_density() const;
  /// N max |Psi|^2 in atoms/cm^3.
  double peak_density_cm3() const;
};

struct CylWidths {
  double time = 0.0;
  double norm = 0.0;
  double mean_x = 0.0;    // lab frame, um
  double dx_long = 0.0;   // um
  double dr_trans = 0.0;  // per-axis transverse width sqrt(<r^2>/2), um
};

CylWidths cyl_widths(const CylState& s);

/// Interaction strength 4 pi hbar^2 a_s N / m in rad/us um^3.
double g3d_internal(double atom_count);

/// Energy per particle in uK (kinetic + external + interaction/2 form of the GPE functional).
double cyl_energy(const CylState& s, const PotentialSpec& longitudinal, double t);

struct CylGroundStateOptions {
  double dtau = 20.0;         // us
  double tolerance = 1e-5;    // residual ||H psi - mu psi|| / |mu|
  std::size_t check_every = 50;
  std::size_t max_steps = 100000;
  double min_dtau = 1e-3;
};

struct CylGroundState {
  CylState state;
  double mu = 0.0;  // chemical potential, uK
  double residual = 0.0;
  std::size_t steps = 0;
  double peak_density_cm3 = 0.0;
};

/// Imaginary-time ground state in the transverse trap plus a static longitudinal potential.
CylGroundState cyl_ground_state(double omega_rad_s, double atom_count,
                                const PotentialSpec& longitudinal, const CylGrid& grid,
                                const CylGroundStateOptions& options = {},
                                const std::optional<CylState>& guess = {});

/// FWHM of sqrt(n(x)), linearly interpolated at half maximum.
double longitudinal_amplitude_fwhm(const CylState& s);

struct TunedGroundState {
  CylGroundState ground;
  double trap_omega_x = 0.0;  // rad/s of the longitudinal harmonic trap
  double fwhm = 0.0;          // um
};

/// Tunes a longitudinal harmonic trap centered at x0 until the amplitude FWHM matches.
TunedGroundState cyl_ground_state_for_fwhm(double omega_rad_s, double atom_count, double fwhm_um,
                                           const CylGrid& grid, double x0_um = 0.0,
                                           double fwhm_tolerance_um = 0.02,
                                           const CylGroundStateOptions& options = {});

/// Spectral interpolation onto a finer longitudinal grid over the same interval.
CylState refine_longitudinal(const CylState& coarse, const Grid1D& fine);

/// Imprints a lab velocity on a t = 0 lab state and re-expresses it in a moving frame.
CylState boost(const CylState& lab, double v_cm_s, double frame_velocity_cm_s);

/// sqrt(n(x)) carrying the on-axis phase; the 1D state for comparison runs.
WaveFunction marginal_wavefunction(const CylState& s);

struct CylPropagationConfig {
  double dt = 0.05;                 // us
  double t_end = 400.0;             // us
  std::size_t snapshot_every = 20;  // steps
};

struct CylTrajectory {
  std::vector<CylWidths> series;
  std::vector<std::string> warnings;
  std::optional<CylState> final_state;
};

CylTrajectory cyl_propagate(const CylState& initial, const PotentialSpec& longitudinal,
                            const CylPropagationConfig& config);

}  // namespace mwshape
