#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "mwshape/propagator.hpp"

namespace mwshape {

// Tasks ----------------------------------------------------------------------

struct FocusTask {};
struct AccelerateTask {
  double factor = 2.0;
};
struct ReflectTask {};
struct StopTask {};
struct SplitTwoTask {
  double separation_sigmas = 4.0;  // peak separation in units of the initial sigma
};
struct SplitThreeTask {
  std::array<double, 3> ratios{4.0, 2.0, 1.0};
  double eval_time = 400.0;  // us
};

using Task = std::variant<FocusTask, AccelerateTask, ReflectTask, StopTask, SplitTwoTask,
                          SplitThreeTask>;

std::string task_name(const Task& task);
/// Parses "focus", "accelerate", "reflect", "stop", "split2", "split3".
Task parse_task(const std::string& name);

struct ObjectiveSpec {
  Task task = FocusTask{};
  double window_start = 0.0;  // us
  double window_end = 600.0;  // us
};

/// Cost of a trajectory under the task's objective (lower is better).
struct ObjectiveValue {
  double cost = 0.0;
  std::vector<std::string> warnings;
};

ObjectiveValue evaluate_objective(const ObjectiveSpec& spec, const Trajectory& traj,
                                  const PotentialSpec& potential);

// Individual functionals ----------------------------------------------------

struct FocusResult {
  double dx_min = 0.0;   // um
  double t_min = 0.0;    // us
  double dx_initial = 0.0;
  double focus_factor() const { return dx_initial / dx_min; }
};

/// Minimum of width_dx over snapshots, refined by a parabola through the
/// three snapshots bracketing the discrete minimum.
FocusResult focus_minimum(const Trajectory& traj);
double cost_focus(const Trajectory& traj);

/// |E_kin(final) - factor * E_kin(initial)| in uK. Requires the switched
/// potential to be off (envelope < 1e-6) at the final snapshot.
double cost_accelerate(const Trajectory& traj, const PotentialSpec& potential, double factor);

/// |<p>_final + p0| as a velocity (cm/s); potential off at the end.
double cost_reflect(const Trajectory& traj, const PotentialSpec& potential);

/// E_kin(final)/E_kin(initial); potential off at the end.
double cost_stop(const Trajectory& traj, const PotentialSpec& potential);

// Peak segmentation ---------------------------------------------------------

struct PeakDecomposition {
  std::vector<double> peak_positions;  // um, lab frame
  std::vector<double> boundaries;      // um, includes both grid edges
  std::vector<double> norms;           // integrated |psi|^2 per segment
};

/// Smooths |psi|^2 with a Gaussian kernel (smoothing_um standard deviation),
/// keeps the `expected_peaks` most prominent maxima and cuts at the deepest
/// minimum between consecutive kept maxima. Throws DomainError listing the
/// found maxima if there are fewer than expected.
PeakDecomposition decompose_peaks(const WaveFunction& wf, std::size_t expected_peaks,
                                  double smoothing_um = 0.5);

/// sqrt(sum (N_i - r_i/sum r)^2) at the snapshot at eval_time.
double split_three_deviation(const PeakDecomposition& peaks, const std::array<double, 3>& ratios);
double cost_split_three(const Trajectory& traj, const std::array<double, 3>& ratios = {4, 2, 1},
                        double eval_time = 400.0);

/// L2 distance between |psi|^2 and a double Gaussian (two copies of the
/// initial density, weights 1/2, separated by separation_sigmas * sigma),
/// minimized over rigid translation and over snapshots. Needs stored states.
/// Returns a large finite penalty when no snapshot shows two peaks.
double cost_split_two(const Trajectory& traj, double sigma_um, double separation_sigmas = 4.0);

/// L2 distance between a density sampled on `grid` and the double-Gaussian
/// target, minimized over translation.
double split_two_distance(const Grid1D& grid, std::span<const double> density, double sigma_um,
                          double separation_sigmas);

/// Penalty returned by cost_split_two when no two-peak snapshot exists.
double split_two_penalty(double sigma_um, double separation_sigmas);

/// (I_max - I_min)/(I_max + I_min) of the density within center +- half_width, with the
/// state trigonometrically interpolated onto an oversampled grid so that fringes near the
/// Nyquist limit are resolved.
double fringe_visibility(const WaveFunction& wf, double center_um, double half_width_um,
                         std::size_t oversample = 32);

}  // namespace mwshape
