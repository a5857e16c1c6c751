#include "mwshape/scenario.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <type_traits>
#include <variant>

#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

GridSpec lab_full() { return GridSpec{}; }

GridSpec lab_search() {
  GridSpec g;
  g.n_points = 32768;
  g.dt = 0.05;
  return g;
}

GridSpec comoving_search(double v_cm_s) {
  GridSpec g;
  g.x_min = -40.0;
  g.x_max = 40.0;
  g.n_points = 4096;
  g.frame_velocity_cm_s = v_cm_s;
  g.dt = 0.05;
  return g;
}

Scenario base(const std::string& name, Task task, double t_end) {
  Scenario s;
  s.name = name;
  s.objective.task = std::move(task);
  s.objective.window_end = t_end;
  s.propagation.t_end = t_end;
  s.full = lab_full();
  s.search = lab_search();
  return s;
}

}  // namespace

Resolution parse_resolution(const std::string& name) {
  if (name == "search") return Resolution::search;
  if (name == "full") return Resolution::full;
  throw ContractError("unknown resolution '" + name + "' (expected search or full)");
}

std::string resolution_name(Resolution r) { return r == Resolution::search ? "search" : "full"; }

Scenario task_preset(const std::string& task, Resolution resolution) {
  Scenario s;
  if (task == "focus") {
    s = base(task, FocusTask{}, 400.0);
    s.potential = CosineWell{97.73, 203.4, 134.3, 50.0, 0.0, FixedCenter{13.23}};
    s.search = comoving_search(0.5 * s.packet.v_cm_s);
    s.free_parameters = {"V0_uK", "t0_us", "tau_us"};
    s.lower = {0.0, 0.0, 10.0};
    s.upper = {100.0, 400.0, 300.0};
  } else if (task == "accelerate") {
    s = base(task, AccelerateTask{}, 150.0);
    s.potential = CosineWell{100.0, 32.50, 35.83, 34.03, 0.0, FixedCenter{13.23}};
    s.free_parameters = {"V0_uK", "t0_us", "tau_us", "sigma_x_um"};
    s.lower = {0.0, 0.0, 5.0, 5.0};
    s.upper = {100.0, 200.0, 200.0, 50.0};
  } else if (task == "reflect") {
    s = base(task, ReflectTask{}, 600.0);
    s.potential = CosineWell{131.4, 284.9, 136.0, 31.93, 0.0, FixedCenter{13.23}};
    s.free_parameters = {"V0_uK", "t0_us", "tau_us", "sigma_x_um"};
    s.lower = {0.0, 0.0, 10.0, 5.0};
    s.upper = {150.0, 400.0, 300.0, 50.0};
  } else if (task == "stop") {
    s = base(task, StopTask{}, 500.0);
    s.potential = CosineWell{100.0, 267.4, 103.5, 52.36, std::numbers::pi / 2.0,
                             MovingCenter{-0.2927, 0.4297 * s.packet.v_cm_s}};
    s.free_parameters = {"t0_us", "tau_us", "sigma_x_um", "x0_um", "v_cm_s"};
    s.lower = {0.0, 10.0, 5.0, -20.0, 0.0};
    s.upper = {400.0, 300.0, 60.0, 20.0, 10.0};
  } else if (task == "split2") {
    s = base(task, SplitTwoTask{}, 500.0);
    s.potential = Composite{{TriangleSplitter{94.6, 189.0, 183.4, 82.2, s.packet.v_cm_s},
                             ParabolicWall{32.0, 10.0}}};
    s.propagation.store_states = true;
    s.propagation.store_every = 5;
    s.free_parameters = {"part0.V0_uK", "part0.t0_us", "part0.tau_us", "part0.sigma_x_um"};
    s.lower = {0.0, 0.0, 10.0, 20.0};
    s.upper = {150.0, 400.0, 300.0, 120.0};
  } else if (task == "split3") {
    s = base(task, SplitThreeTask{}, 400.0);
    s.potential = TwoRampSplitter{40.0, 90.0, 75.0, 20.0, s.packet.v_cm_s, 3.207, 8.000, 1.778};
    s.free_parameters = {"x1_um", "v2_cm_s", "x2_um"};
    s.lower = {-10.0, 0.0, -10.0};
    s.upper = {10.0, 15.0, 10.0};
  } else {
    throw ContractError("unknown task '" + task + "'");
  }
  s.resolution = resolution;
  return s;
}

const GridSpec& active_grid(const Scenario& s) {
  return s.resolution == Resolution::search ? s.search : s.full;
}

WaveFunction initial_state(const Scenario& s) {
  const GridSpec& g = active_grid(s);
  Grid1D grid(g.x_min, g.x_max, g.n_points);
  return gaussian_packet(grid, s.packet.fwhm_um, s.packet.v_cm_s, s.packet.x0_um,
                         g.frame_velocity_cm_s);
}

PropagationConfig propagation_config(const Scenario& s) {
  const GridSpec& g = active_grid(s);
  PropagationConfig c = s.propagation;
  c.dt = g.dt;
  const double steps = s.snapshot_interval / g.dt;
  c.snapshot_every = static_cast<std::size_t>(std::llround(steps));
  if (c.snapshot_every < 1 || std::abs(steps - static_cast<double>(c.snapshot_every)) > 1e-9)
    throw ContractError("snapshot interval must be a whole number of time steps");
  return c;
}

Trajectory run(const Scenario& s, const PotentialSpec& potential,
               const SnapshotObserver& observer) {
  return propagate(initial_state(s), potential, propagation_config(s), observer);
}

ObjectiveValue score(const Scenario& s, const PotentialSpec& potential) {
  const Trajectory traj = run(s, potential);
  ObjectiveValue v = evaluate_objective(s.objective, traj, potential);
  v.warnings.insert(v.warnings.begin(), traj.warnings.begin(), traj.warnings.end());
  return v;
}

OptimizationProblem make_problem(const Scenario& s, std::size_t budget) {
  const auto mask = make_mask(s.potential, s.free_parameters);
  OptimizationProblem p;
  p.guess = parameter_vector(s.potential, mask);
  p.lower = s.lower;
  p.upper = s.upper;
  p.budget = budget;
  p.objective = [s, mask](std::span<const double> x) {
    try {
      return score(s, with_parameters(s.potential, x, mask)).cost;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return p;
}

Metric target_metric(const Scenario& s) {
  return [s](const PotentialSpec& potential) {
    const Trajectory traj = run(s, potential);
    const Observables& first = traj.observables.front();
    const Observables& last = traj.observables.back();
    return std::visit(
        [&](const auto& task) -> double {
          using T = std::decay_t<decltype(task)>;
          if constexpr (std::is_same_v<T, FocusTask>) {
            return evaluate_objective(s.objective, traj, potential).cost;
          } else if constexpr (std::is_same_v<T, AccelerateTask>) {
            cost_accelerate(traj, potential, task.factor);
            return last.mean_p;
          } else if constexpr (std::is_same_v<T, ReflectTask>) {
            cost_reflect(traj, potential);
            return last.mean_p;
          } else if constexpr (std::is_same_v<T, StopTask>) {
            cost_stop(traj, potential);
            return 100.0 * last.kinetic_energy / first.kinetic_energy;
          } else {
            return evaluate_objective(s.objective, traj, potential).cost;
          }
        },
        s.objective.task);
  };
}

bool metric_is_raw(const Scenario& s) {
  return std::holds_alternative<StopTask>(s.objective.task) ||
         std::holds_alternative<SplitThreeTask>(s.objective.task) ||
         std::holds_alternative<SplitTwoTask>(s.objective.task);
}

SplitCrossing split_two_crossing(const Scenario& s, const PotentialSpec& potential,
                                 double split_time, double half_width_um) {
  PropagationConfig head = propagation_config(s);
  head.store_states = false;
  head.t_end = split_time;
  const Trajectory first = propagate(initial_state(s), potential, head);
  const WaveFunction& at_split = *first.final_state;
  const auto peaks = decompose_peaks(at_split, 2);

  SplitCrossing out;
  out.split_time = split_time;
  out.norms = {peaks.norms[0], peaks.norms[1]};
  WaveFunction left = at_split, right = at_split;
  for (std::size_t i = 0; i < at_split.grid.size(); ++i) {
    if (at_split.lab_position(i) < peaks.boundaries[1])
      right.amplitudes[i] = 0.0;
    else
      left.amplitudes[i] = 0.0;
  }

  PropagationConfig tail = propagation_config(s);
  tail.store_states = false;
  const Trajectory tl = propagate(left, potential, tail);
  const Trajectory tr = propagate(right, potential, tail);
  std::size_t k = 1;
  for (; k < tl.times.size(); ++k)
    if (tr.observables[k].mean_x <= tl.observables[k].mean_x) break;
  if (k == tl.times.size()) throw DomainError("split_two_crossing: partial beams do not meet before t_end");

  const double d0 = tr.observables[k - 1].mean_x - tl.observables[k - 1].mean_x;
  const double d1 = tr.observables[k].mean_x - tl.observables[k].mean_x;
  const double f = d0 / (d0 - d1);
  out.crossing_time = tl.times[k - 1] + f * (tl.times[k] - tl.times[k - 1]);
  const std::size_t nearest = f < 0.5 ? k - 1 : k;
  out.visibility_time = tl.times[nearest];
  out.position = 0.5 * (tl.observables[nearest].mean_x + tr.observables[nearest].mean_x);

  tail.t_end = out.visibility_time;
  WaveFunction sum = *propagate(left, potential, tail).final_state;
  const WaveFunction rpart = *propagate(right, potential, tail).final_state;
  for (std::size_t i = 0; i < sum.grid.size(); ++i) sum.amplitudes[i] += rpart.amplitudes[i];
  out.visibility = fringe_visibility(sum, out.position, half_width_um);
  return out;
}

SensitivityReport scenario_sensitivity(const Scenario& s, double fraction) {
  return sensitivity(s.potential, s.free_parameters, target_metric(s), metric_is_raw(s), fraction);
}

}  // namespace mwshape
