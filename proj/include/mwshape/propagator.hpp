#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mwshape/potentials.hpp"
#include "mwshape/wavefunction.hpp"

namespace mwshape {

/// Cosine-ramp amplitude mask cos(pi/2 * d/w)^strength over the outer `width`
/// of each grid end (d = depth into the absorbing layer).
struct AbsorbingBoundary {
  bool enabled = false;
  double width_um = 0.0;  // 0 selects 5% of the grid length
  double strength = 0.125;
};

struct PropagationConfig {
  double dt = 0.02;                 // us
  double t_end = 600.0;             // us
  std::size_t snapshot_every = 50;  // steps
  double g1d = 0.0;                 // uK um; 0 gives the linear TDSE
  AbsorbingBoundary boundary;
  bool store_states = false;        // keep a WaveFunction per snapshot
  std::size_t store_every = 1;      // ... or per store_every-th snapshot
  bool momentum_density = false;    // fill Observables::momentum_density
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Observables> observables;
  std::vector<WaveFunction> states;  // empty unless store_states
  std::optional<WaveFunction> final_state;
  std::vector<std::string> warnings;
  double absorbed_norm = 0.0;
};

using SnapshotObserver = std::function<void(const WaveFunction&, const Observables&)>;

/// Strang split-step propagation of the TDSE / 1D TD-GPE,
///   i d psi/dt = [-(hbar/2m) d^2/dx^2 + V(x,t)/hbar + g1d |psi|^2 / hbar] psi,
/// with V and the density term evaluated at the half step. Snapshots are taken
/// at the start, every `snapshot_every` steps and at t_end.
///
/// Throws ContractError if (t_end - t) is not a whole number of steps,
/// NumericalError (naming the step) on NaN.
Trajectory propagate(const WaveFunction& initial, const PotentialSpec& potential,
                     const PropagationConfig& config, const SnapshotObserver& observer = {});

/// 1D coupling 4 pi hbar^2 a_s N / (m a_perp) with a_perp = pi hbar/(m omega),
/// in uK um. omega_trans in rad/s.
double g1d_from_physical(double atom_count, double omega_trans_rad_s);

/// Coupling that gives peak mean-field energy 4 pi hbar^2 a_s n / m for a
/// Gaussian packet of width sigma (peak |psi|^2 = 1/(sigma sqrt(pi))), uK um.
double g1d_from_peak_density(double density_cm3, double sigma_um);

/// Peak 3D density (atoms/cm^3) that corresponds to g1d for that packet.
double peak_density_from_g1d(double g1d_uK_um, double sigma_um);

/// GPE energy functional <T> + <V> + g/2 int |psi|^4, in uK (state normalized).
struct EnergyParts {
  double kinetic = 0.0;
  double potential = 0.0;
  double interaction = 0.0;
  double total() const { return kinetic + potential + interaction; }
};
EnergyParts energy(const WaveFunction& wf, const PotentialSpec& potential, double t, double g1d);

struct GroundStateOptions {
  double dtau = 0.5;              // initial imaginary time step (us)
  double tolerance = 1e-9;        // residual ||H psi - E psi|| / |E|
  std::size_t check_every = 50;
  std::size_t max_steps = 4'000'000;
  double min_dtau = 1e-4;
};

struct GroundStateResult {
  WaveFunction state;
  double energy_uK = 0.0;
  double residual = 0.0;
  std::size_t steps = 0;
};

/// Imaginary-time relaxation in the potential frozen at time t. The step is
/// halved when the residual stalls above tolerance. Throws NumericalError if
/// the state leaks to the grid edges (non-confining potential) or the step
/// budget runs out.
GroundStateResult imaginary_time_ground_state(const PotentialSpec& potential, double t,
                                              double g1d, const Grid1D& grid,
                                              const GroundStateOptions& options = {},
                                              const std::optional<WaveFunction>& guess = {});

}  // namespace mwshape
