#pragma once

#include <array>
#include <string>
#include <vector>

#include "mwshape/objectives.hpp"
#include "mwshape/optimizer.hpp"
#include "mwshape/potentials.hpp"
#include "mwshape/propagator.hpp"
#include "mwshape/robustness.hpp"

namespace mwshape {

enum class Resolution { search, full };

Resolution parse_resolution(const std::string& name);
std::string resolution_name(Resolution r);

struct PacketSpec {
  double fwhm_um = 10.0;
  double v_cm_s = 10.0;
  double x0_um = 0.0;
};

struct GridSpec {
  double x_min = -100.0;  // um, in the frame moving at frame_velocity_cm_s
  double x_max = 300.0;
  std::size_t n_points = 65536;
  double frame_velocity_cm_s = 0.0;
  double dt = 0.02;  // us
};

// A task together with everything needed to score a potential for it.
struct Scenario {
  std::string name;
  ObjectiveSpec objective;
  PotentialSpec potential;
  PacketSpec packet;
  GridSpec full;
  GridSpec search;
  Resolution resolution = Resolution::full;
  PropagationConfig propagation;     // dt and snapshot_every are derived from the grid spec
  double snapshot_interval = 1.0;    // us
  std::vector<std::string> free_parameters;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Presets for "focus", "accelerate", "reflect", "stop", "split2", "split3".
Scenario task_preset(const std::string& task, Resolution resolution = Resolution::full);

const GridSpec& active_grid(const Scenario& s);
WaveFunction initial_state(const Scenario& s);
PropagationConfig propagation_config(const Scenario& s);

Trajectory run(const Scenario& s, const PotentialSpec& potential,
               const SnapshotObserver& observer = {});
inline Trajectory run(const Scenario& s) { return run(s, s.potential); }

ObjectiveValue score(const Scenario& s, const PotentialSpec& potential);

/// Cost as a function of the free parameters; failures map to +inf.
OptimizationProblem make_problem(const Scenario& s, std::size_t budget);

/// Task target quantity for perturbation studies: focus dx_min (um), accelerate and
/// reflect final <p> (cm/s), stop remaining E_kin (% of initial),
/// split2 distance, split3 deviation.
Metric target_metric(const Scenario& s);
bool metric_is_raw(const Scenario& s);

struct SplitCrossing {
  double split_time = 0.0;        // us
  std::array<double, 2> norms{};  // left/right peak norms at split_time
  double crossing_time = 0.0;     // us; when the partial-beam centroids meet
  double position = 0.0;          // um, lab frame
  double visibility = 0.0;        // of the full density around position at the nearest snapshot
  double visibility_time = 0.0;   // us
};

/// Cuts the state at split_time into its two peaks, propagates each part on its own
/// (exact for the linear equation) and locates the first meeting of their centroids.
/// Throws DomainError when the parts never meet before t_end.
SplitCrossing split_two_crossing(const Scenario& s, const PotentialSpec& potential,
                                 double split_time = 200.0, double half_width_um = 0.5);

SensitivityReport scenario_sensitivity(const Scenario& s, double fraction = 0.01);

}  // namespace mwshape
