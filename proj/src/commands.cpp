#include "mwshape/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "mwshape/constants.hpp"
#include "mwshape/cylgpe.hpp"
#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json number(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json observables_json(const Observables& o) {
  return {{"t_us", number(o.time)},           {"norm", number(o.norm)},
          {"mean_x_um", number(o.mean_x)},    {"dx_um", number(o.width_dx)},
          {"mean_p_cm_s", number(o.mean_p)},  {"dp_cm_s", number(o.width_p)},
          {"Ekin_uK", number(o.kinetic_energy)}};
}

Table observables_table(const Trajectory& traj) {
  Table t{{"t_us", "norm", "mean_x_um", "dx_um", "mean_p_cm_s", "Ekin_uK", "dp_cm_s"}, {}};
  for (const auto& o : traj.observables)
    t.rows.push_back({o.time, o.norm, o.mean_x, o.width_dx, o.mean_p, o.kinetic_energy, o.width_p});
  return t;
}

// Mean of x over consecutive blocks of ceil(n / cells).
std::vector<double> block_means(const std::vector<double>& x, std::size_t cells) {
  const std::size_t n = x.size();
  const std::size_t block = std::max<std::size_t>(1, (n + cells - 1) / cells);
  std::vector<double> out;
  for (std::size_t b = 0; b < n; b += block) {
    const std::size_t e = std::min(n, b + block);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i];
    out.push_back(s / static_cast<double>(e - b));
  }
  return out;
}

// Momentum density per cm/s at the velocities `v` (linear interpolation, lab frame).
std::vector<double> momentum_profile(const WaveFunction& wf, const Observables& o,
                                     const std::vector<double>& v) {
  const Grid1D& g = wf.grid;
  const std::size_t n = g.size();
  const double ku = units::velocity_to_wavenumber(wf.frame_velocity_cm_s);
  const double per_cm_s = units::velocity_to_wavenumber(1.0);
  std::vector<double> vs(n), ds(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = (j + n / 2) % n;  // ascending k
    vs[j] = units::wavenumber_to_velocity(g.k(i) + ku);
    ds[j] = o.momentum_density[i] * per_cm_s;
  }
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t c = 0; c < v.size(); ++c) {
    auto it = std::upper_bound(vs.begin(), vs.end(), v[c]);
    if (it == vs.begin() || it == vs.end()) continue;
    const std::size_t j = static_cast<std::size_t>(it - vs.begin());
    const double w = (v[c] - vs[j - 1]) / (vs[j] - vs[j - 1]);
    out[c] = (1.0 - w) * ds[j - 1] + w * ds[j];
  }
  return out;
}

fs::path prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw ConfigError("--out", "cannot create output directory " + out.string());
  return out;
}

json potential_json(const PotentialSpec& p) {
  json j;
  j["family"] = p.family();
  const auto names = parameter_names(p);
  const auto values = parameter_vector(p);
  json params = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = number(values[i]);
  j["parameters"] = params;
  return j;
}

json base_summary(const RunConfig& c, const std::string& command) {
  const Scenario& s = c.scenario;
  json j;
  j["command"] = command;
  j["task"] = c.task;
  j["model"] = model_kind_name(c.model.kind);
  j["resolution"] = resolution_name(s.resolution);
  j["g1d_uK_um"] = number(s.propagation.g1d);
  j["potential"] = potential_json(s.potential);
  return j;
}

CylGrid cyl_grid_for(const RunConfig& c, const Grid1D& longitudinal) {
  const double w = 2.0 * std::numbers::pi * c.model.omega_trans_hz;
  return CylGrid::for_trap(longitudinal, w, c.model.radial_points, c.model.r_max_factor);
}

// Ground state with amplitude FWHM tuned by a harmonic longitudinal trap (1D).
GroundStateResult tuned_ground_state_1d(double g1d, const Grid1D& grid, double x0, double fwhm,
                                        double trap_omega, double tolerance, double& omega_out) {
  GroundStateOptions opts;
  opts.tolerance = tolerance;
  auto solve = [&](double w, const std::optional<WaveFunction>& guess) {
    return imaginary_time_ground_state(HarmonicTrap{x0, w}, 0.0, g1d, grid, opts, guess);
  };
  auto fwhm_of = [&](const WaveFunction& wf) {
    const auto d = wf.density();
    const std::size_t imax = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    const double half = 0.5 * std::sqrt(d[imax]);
    std::size_t l = imax, r = imax;
    while (l > 0 && std::sqrt(d[l]) > half) --l;
    while (r + 1 < d.size() && std::sqrt(d[r]) > half) ++r;
    const double al = std::sqrt(d[l]), al1 = std::sqrt(d[l + 1]);
    const double ar = std::sqrt(d[r]), ar1 = std::sqrt(d[r - 1]);
    const double xl = grid.x(l) + (half - al) / (al1 - al) * grid.dx();
    const double xr = grid.x(r - 1) + (ar1 - half) / (ar1 - ar) * grid.dx();
    return xr - xl;
  };
  if (trap_omega > 0.0) {
    omega_out = trap_omega;
    return solve(trap_omega, std::nullopt);
  }
  // non-interacting start, then a log-log secant on the trap frequency
  const double sigma = units::fwhm_to_sigma(fwhm);
  double w0 = units::hbar_over_m / (sigma * sigma) * 1e6;
  auto r0 = solve(w0, std::nullopt);
  double f0 = fwhm_of(r0.state);
  double w1 = w0 * std::pow(f0 / fwhm, 2.0);
  auto r1 = solve(w1, r0.state);
  double f1 = fwhm_of(r1.state);
  for (int it = 0; it < 30 && std::abs(f1 - fwhm) > 0.01; ++it) {
    const double slope = (std::log(f1) - std::log(f0)) / (std::log(w1) - std::log(w0));
    const double w2 = std::exp(std::log(w1) + (std::log(fwhm) - std::log(f1)) / (slope != 0.0 ? slope : -0.5));
    w0 = w1;
    f0 = f1;
    w1 = w2;
    r1 = solve(w1, r1.state);
    f1 = fwhm_of(r1.state);
  }
  if (std::abs(f1 - fwhm) > 0.01) throw NumericalError("ground state: FWHM tuning did not converge");
  omega_out = w1;
  return r1;
}

CommandResult propagate_cyl(const RunConfig& c, const fs::path& out) {
  const Scenario& s = c.scenario;
  const GridSpec& gs = active_grid(s);
  const Grid1D fine(gs.x_min, gs.x_max, gs.n_points);
  const Grid1D coarse(gs.x_min, gs.x_max, std::min(c.model.prep_points, gs.n_points));
  const double w = 2.0 * std::numbers::pi * c.model.omega_trans_hz;
  CylGroundStateOptions gopts;
  gopts.tolerance = c.ground_state.tolerance;
  const CylGrid prep_grid = cyl_grid_for(c, coarse);
  CylState prepared = [&] {
    if (c.ground_state.trap_omega_rad_s > 0.0)
      return cyl_ground_state(w, c.model.atom_count, HarmonicTrap{s.packet.x0_um, c.ground_state.trap_omega_rad_s},
                              prep_grid, gopts)
          .state;
    return cyl_ground_state_for_fwhm(w, c.model.atom_count, s.packet.fwhm_um, prep_grid, s.packet.x0_um, 0.02, gopts)
        .ground.state;
  }();
  const CylState start = boost(refine_longitudinal(prepared, fine), s.packet.v_cm_s, gs.frame_velocity_cm_s);

  CylPropagationConfig pc;
  pc.dt = gs.dt;
  pc.t_end = s.propagation.t_end;
  pc.snapshot_every = static_cast<std::size_t>(std::llround(s.snapshot_interval / gs.dt));
  const CylTrajectory cyl = cyl_propagate(start, s.potential, pc);

  PropagationConfig p1 = propagation_config(s);
  p1.g1d = g1d_from_physical(c.model.atom_count, w);
  const Trajectory one = propagate(marginal_wavefunction(start), s.potential, p1);

  Table tc{{"t_us", "norm", "mean_x_um", "dx_um", "dr_um"}, {}};
  for (const auto& r : cyl.series) tc.rows.push_back({r.time, r.norm, r.mean_x, r.dx_long, r.dr_trans});
  write_table(out / "cyl_widths.tsv", tc);
  write_table(out / "gpe1d_widths.tsv", observables_table(one));

  auto cyl_min = std::min_element(cyl.series.begin(), cyl.series.end(),
                                  [](const CylWidths& a, const CylWidths& b) { return a.dx_long < b.dx_long; });
  const FocusResult f1 = focus_minimum(one);
  double dr_max = 0.0;
  for (const auto& r : cyl.series)
    if (r.time <= cyl_min->time) dr_max = std::max(dr_max, r.dr_trans);
  const double growth = dr_max / cyl.series.front().dr_trans - 1.0;

  json j = base_summary(c, "propagate");
  j["g1d_uK_um"] = number(p1.g1d);
  j["peak_density_cm3"] = number(prepared.peak_density_cm3());
  j["cyl_dx_min_um"] = number(cyl_min->dx_long);
  j["cyl_t_min_us"] = number(cyl_min->time);
  j["gpe1d_dx_min_um"] = number(f1.dx_min);
  j["gpe1d_t_min_us"] = number(f1.t_min);
  j["dx_min_ratio"] = number(cyl_min->dx_long / f1.dx_min);
  j["transverse_growth_before_focus"] = number(growth);
  json warnings = cyl.warnings;
  for (const auto& wmsg : one.warnings) warnings.push_back(wmsg);
  j["warnings"] = warnings;
  write_json(out / "summary.json", j);

  std::ostringstream msg;
  msg << "cyl dx_min " << format_number(cyl_min->dx_long) << " um at " << format_number(cyl_min->time)
      << " us; 1D GPE dx_min " << format_number(f1.dx_min) << " um; transverse growth "
      << format_number(100.0 * growth) << " %";
  return {{"cyl_widths.tsv", "gpe1d_widths.tsv", "summary.json"}, msg.str()};
}

}  // namespace

std::string version() {
#ifdef MWSHAPE_VERSION
  return MWSHAPE_VERSION;
#else
  return "unknown";
#endif
}

Map2D block_average(const std::vector<double>& row_axis, const std::vector<double>& col_axis,
                    const std::vector<double>& values, std::size_t max_rows, std::size_t max_cols) {
  const std::size_t nr = row_axis.size(), nc = col_axis.size();
  if (values.size() != nr * nc) throw ContractError("block_average: value count mismatch");
  if (max_rows < 1 || max_cols < 1) throw ContractError("block_average: need at least one cell");
  Map2D m;
  m.row_axis = block_means(row_axis, max_rows);
  m.column_axis = block_means(col_axis, max_cols);
  const std::size_t rb = std::max<std::size_t>(1, (nr + max_rows - 1) / max_rows);
  const std::size_t cb = std::max<std::size_t>(1, (nc + max_cols - 1) / max_cols);
  m.values.assign(m.row_axis.size() * m.column_axis.size(), 0.0);
  for (std::size_t r = 0; r < m.row_axis.size(); ++r)
    for (std::size_t col = 0; col < m.column_axis.size(); ++col) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = r * rb; i < std::min(nr, (r + 1) * rb); ++i)
        for (std::size_t k = col * cb; k < std::min(nc, (col + 1) * cb); ++k) {
          sum += values[i * nc + k];
          ++count;
        }
      m.values[r * m.column_axis.size() + col] = sum / static_cast<double>(count);
    }
  return m;
}

CommandResult cmd_propagate(const RunConfig& c, const fs::path& out) {
  prepare_dir(out);
  if (c.model.kind == ModelKind::cylgpe) return propagate_cyl(c, out);
  const Scenario& s = c.scenario;
  const GridSpec& gs = active_grid(s);
  const Grid1D grid(gs.x_min, gs.x_max, gs.n_points);

  std::vector<double> x_axis = block_means(grid.positions(), c.output.map_x_cells);
  std::vector<double> v_axis(c.output.map_k_cells);
  const double dv = (c.output.v_max_cm_s - c.output.v_min_cm_s) / static_cast<double>(v_axis.size());
  for (std::size_t i = 0; i < v_axis.size(); ++i) v_axis[i] = c.output.v_min_cm_s + (static_cast<double>(i) + 0.5) * dv;

  std::vector<double> times, dens, mom;
  std::vector<std::string> files;
  SpectralTransform ws(grid.size());
  if (c.output.full_snapshots) fs::create_directories(out / "snapshots");
  const SnapshotObserver observer = [&](const WaveFunction& wf, const Observables&) {
    times.push_back(wf.time);
    const auto row = block_means(wf.density(), c.output.map_x_cells);
    dens.insert(dens.end(), row.begin(), row.end());
    const Observables o = observables(wf, ws, true);
    const auto mrow = momentum_profile(wf, o, v_axis);
    mom.insert(mom.end(), mrow.begin(), mrow.end());
    if (c.output.full_snapshots) {
      Table t{{"x_um", "re", "im"}, {}};
      for (std::size_t i = 0; i < grid.size(); ++i)
        t.rows.push_back({wf.lab_position(i), wf.amplitudes[i].real(), wf.amplitudes[i].imag()});
      const std::string name = "snapshots/psi_t" + format_number(wf.time) + ".tsv";
      write_table(out / name, t);
      files.push_back(name);
    }
  };
  const Trajectory traj = run(s, s.potential, observer);

  write_table(out / "observables.tsv", observables_table(traj));
  Map2D dmap = block_average(times, x_axis, dens, c.output.map_time_cells, x_axis.size());
  dmap.row_label = "t_us";
  dmap.column_label = gs.frame_velocity_cm_s == 0.0 ? "x_um" : "x_frame_um";
  write_map(out / "density_map.tsv", dmap);
  Map2D mmap = block_average(times, v_axis, mom, c.output.map_time_cells, v_axis.size());
  mmap.row_label = "t_us";
  mmap.column_label = "v_cm_s";
  write_map(out / "momentum_map.tsv", mmap);

  json j = base_summary(c, "propagate");
  j["frame_velocity_cm_s"] = number(gs.frame_velocity_cm_s);
  j["initial"] = observables_json(traj.observables.front());
  j["final"] = observables_json(traj.observables.back());
  const FocusResult f = focus_minimum(traj);
  j["dx_min_um"] = number(f.dx_min);
  j["t_min_us"] = number(f.t_min);
  j["focus_factor"] = number(f.focus_factor());
  std::ostringstream msg;
  try {
    const ObjectiveValue v = evaluate_objective(s.objective, traj, s.potential);
    j["cost"] = number(v.cost);
    json w = traj.warnings;
    for (const auto& m : v.warnings) w.push_back(m);
    j["warnings"] = w;
    msg << c.task << " cost " << format_number(v.cost);
  } catch (const DomainError& e) {
    j["cost"] = nullptr;
    j["cost_error"] = e.what();
    j["warnings"] = traj.warnings;
    msg << c.task << " cost unavailable: " << e.what();
  }
  j["absorbed_norm"] = number(traj.absorbed_norm);
  write_json(out / "summary.json", j);
  msg << "; dx_min " << format_number(f.dx_min) << " um at " << format_number(f.t_min) << " us";

  files.insert(files.begin(), {"observables.tsv", "density_map.tsv", "momentum_map.tsv", "summary.json"});
  return {files, msg.str()};
}

CommandResult cmd_optimize(const RunConfig& c, const fs::path& out) {
  prepare_dir(out);
  const Scenario& s = c.scenario;
  const OptimizationProblem problem = make_problem(s, c.optimize.budget);
  const OptimizationResult r =
      c.optimize.restarts > 0
          ? random_walk_restarts(problem, c.optimize.restarts, c.optimize.step_fraction, c.seed, c.optimize.nelder_mead)
          : nelder_mead(problem, c.optimize.nelder_mead);

  const auto mask = make_mask(s.potential, s.free_parameters);
  const PotentialSpec best = with_parameters(s.potential, r.best_parameters, mask);
  json j = base_summary(c, "optimize");
  j["seed"] = c.seed;
  j["free_parameters"] = s.free_parameters;
  j["lower"] = numbers(s.lower);
  j["upper"] = numbers(s.upper);
  j["guess"] = numbers(problem.guess);
  j["budget"] = c.optimize.budget;
  j["restarts"] = c.optimize.restarts;
  j["best_parameters"] = numbers(r.best_parameters);
  j["best_cost"] = number(r.best_cost);
  j["evaluations"] = r.evaluations;
  j["converged"] = r.converged;
  j["optimized_potential"] = potential_json(best);
  std::ostringstream msg;
  msg << "best cost " << format_number(r.best_cost) << " after " << r.evaluations << " evaluations"
      << (r.converged ? "" : " (not converged)");
  if (c.optimize.rescore_full && s.resolution != Resolution::full) {
    Scenario full = s;
    full.resolution = Resolution::full;
    try {
      const ObjectiveValue v = score(full, best);
      j["full_resolution_cost"] = number(v.cost);
      j["full_resolution_warnings"] = v.warnings;
      msg << "; full resolution " << format_number(v.cost);
    } catch (const DomainError& e) {
      j["full_resolution_cost"] = nullptr;
      j["full_resolution_error"] = e.what();
    }
  }
  json log = json::array();
  Table t{s.free_parameters, {}};
  t.columns.push_back("cost");
  for (const auto& e : r.log) {
    log.push_back({{"parameters", numbers(e.parameters)}, {"cost", number(e.cost)}});
    auto row = e.parameters;
    row.push_back(e.cost);
    t.rows.push_back(row);
  }
  j["log"] = log;
  write_json(out / "optimization.json", j);
  write_table(out / "evaluations.tsv", t);
  return {{"optimization.json", "evaluations.tsv"}, msg.str()};
}

CommandResult cmd_sensitivity(const RunConfig& c, const fs::path& out) {
  prepare_dir(out);
  const Scenario& s = c.scenario;
  const auto& params = c.sensitivity_parameters.empty() ? s.free_parameters : c.sensitivity_parameters;
  const SensitivityReport rep =
      sensitivity(s.potential, params, target_metric(s), metric_is_raw(s), c.sensitivity_fraction);
  json j = base_summary(c, "sensitivity");
  j["fraction"] = number(c.sensitivity_fraction);
  j["nominal"] = number(rep.nominal);
  j["raw"] = rep.raw;
  json entries = json::array();
  auto run_json = [](const PerturbedRun& p) {
    json r{{"scale", number(p.scale)}, {"ok", p.ok}, {"value", number(p.value)}};
    if (!p.ok) r["error"] = p.error;
    return r;
  };
  std::ostringstream msg;
  msg << "nominal " << format_number(rep.nominal);
  for (const auto& e : rep.entries) {
    entries.push_back({{"parameter", e.parameter},
                       {"plus", run_json(e.plus)},
                       {"minus", run_json(e.minus)},
                       {"mean_abs_change_percent", number(e.mean_abs_change_percent)},
                       {"mean_value", number(e.mean_value)}});
    msg << "\n  " << e.parameter << ": "
        << format_number(rep.raw ? e.mean_value : e.mean_abs_change_percent) << (rep.raw ? "" : " %");
  }
  j["entries"] = entries;
  write_json(out / "sensitivity.json", j);
  return {{"sensitivity.json"}, msg.str()};
}

CommandResult cmd_sweep_density(const RunConfig& c, const fs::path& out) {
  prepare_dir(out);
  if (c.sweep_densities_cm3.empty()) throw ConfigError("sweep.densities_cm3", "needs at least one density");
  Scenario s = c.scenario;
  const double sigma = units::fwhm_to_sigma(s.packet.fwhm_um);
  std::vector<double> densities{0.0};
  densities.insert(densities.end(), c.sweep_densities_cm3.begin(), c.sweep_densities_cm3.end());
  Table t{{"density_cm3", "g1d_uK_um", "dx_min_um", "t_min_us", "focus_factor"}, {}};
  std::ostringstream msg;
  for (double d : densities) {
    s.propagation.g1d = d > 0.0 ? g1d_from_peak_density(d, sigma) : 0.0;
    const FocusResult f = focus_minimum(run(s));
    t.rows.push_back({d, s.propagation.g1d, f.dx_min, f.t_min, f.focus_factor()});
    msg << (d == 0.0 ? "TDSE" : format_number(d)) << ": F " << format_number(f.focus_factor()) << "\n";
  }
  write_table(out / "sweep.tsv", t);
  std::string m = msg.str();
  if (!m.empty()) m.pop_back();
  return {{"sweep.tsv"}, m};
}

CommandResult cmd_ground_state(const RunConfig& c, const fs::path& out) {
  prepare_dir(out);
  const auto& gsp = c.ground_state;
  const Grid1D grid(gsp.x_min_um, gsp.x_max_um, gsp.n_points);
  const double x0 = c.scenario.packet.x0_um;
  json j = base_summary(c, "ground-state");
  j.erase("potential");
  std::ostringstream msg;
  if (c.model.kind == ModelKind::cylgpe) {
    const double w = 2.0 * std::numbers::pi * c.model.omega_trans_hz;
    const CylGrid cg = cyl_grid_for(c, grid);
    CylGroundStateOptions opts;
    opts.tolerance = gsp.tolerance;
    double trap = gsp.trap_omega_rad_s;
    const CylGroundState g = [&] {
      if (trap > 0.0) return cyl_ground_state(w, c.model.atom_count, HarmonicTrap{x0, trap}, cg, opts);
      auto tuned = cyl_ground_state_for_fwhm(w, c.model.atom_count, gsp.fwhm_um, cg, x0, 0.02, opts);
      trap = tuned.trap_omega_x;
      return tuned.ground;
    }();
    const CylWidths wd = cyl_widths(g.state);
    Table t{{"x_um", "n_per_um"}, {}};
    const auto n = g.state.longitudinal_density();
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid.x(i), n[i]});
    write_table(out / "longitudinal_density.tsv", t);
    const std::size_t ic = grid.index_of(x0);
    Table rt{{"r_um", "density_cm3"}, {}};
    for (std::size_t r = 0; r < cg.n_r; ++r)
      rt.rows.push_back({cg.r(r), c.model.atom_count * std::norm(g.state.amplitudes[r * grid.size() + ic]) * 1e12});
    write_table(out / "radial_profile.tsv", rt);
    j["atom_count"] = number(c.model.atom_count);
    j["omega_trans_hz"] = number(c.model.omega_trans_hz);
    j["trap_omega_x_rad_s"] = number(trap);
    j["fwhm_um"] = number(longitudinal_amplitude_fwhm(g.state));
    j["mu_uK"] = number(g.mu);
    j["residual"] = number(g.residual);
    j["steps"] = g.steps;
    j["peak_density_cm3"] = number(g.peak_density_cm3);
    j["dx_um"] = number(wd.dx_long);
    j["dr_um"] = number(wd.dr_trans);
    write_json(out / "summary.json", j);
    msg << "peak density " << format_number(g.peak_density_cm3) << " cm^-3, mu " << format_number(g.mu)
        << " uK, residual " << format_number(g.residual);
    return {{"longitudinal_density.tsv", "radial_profile.tsv", "summary.json"}, msg.str()};
  }
  const double g1d = c.scenario.propagation.g1d;
  double trap = 0.0;
  const GroundStateResult g =
      tuned_ground_state_1d(g1d, grid, x0, gsp.fwhm_um, gsp.trap_omega_rad_s, gsp.tolerance, trap);
  Table t{{"x_um", "re", "im", "density_per_um"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.rows.push_back({grid.x(i), g.state.amplitudes[i].real(), g.state.amplitudes[i].imag(),
                      std::norm(g.state.amplitudes[i])});
  write_table(out / "ground_state.tsv", t);
  const Observables o = observables(g.state, false);
  j["trap_omega_x_rad_s"] = number(trap);
  j["energy_uK"] = number(g.energy_uK);
  j["residual"] = number(g.residual);
  j["steps"] = g.steps;
  j["dx_um"] = number(o.width_dx);
  j["mean_x_um"] = number(o.mean_x);
  write_json(out / "summary.json", j);
  msg << "energy " << format_number(g.energy_uK) << " uK, dx " << format_number(o.width_dx) << " um";
  return {{"ground_state.tsv", "summary.json"}, msg.str()};
}

CommandResult run_command(const std::string& name, const RunConfig& config, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult r;
  if (name == "propagate")
    r = cmd_propagate(config, out);
  else if (name == "optimize")
    r = cmd_optimize(config, out);
  else if (name == "sensitivity")
    r = cmd_sensitivity(config, out);
  else if (name == "sweep-density")
    r = cmd_sweep_density(config, out);
  else if (name == "ground-state")
    r = cmd_ground_state(config, out);
  else
    throw ConfigError("command", "unknown command '" + name + "'");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json files = json::array();
  std::vector<std::string> sorted = r.files;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& f : sorted)
    files.push_back({{"path", f}, {"bytes", fs::file_size(out / f)}, {"sha256", sha256_file(out / f)}});
  const std::time_t now = std::time(nullptr);
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  json m;
  m["command"] = name;
  m["version"] = version();
  m["task"] = config.task;
  m["seed"] = config.seed;
  m["resolution"] = resolution_name(config.scenario.resolution);
  m["config"] = config.entries;
  m["files"] = files;
  m["elapsed_s"] = elapsed;
  m["created_utc"] = stamp.str();
  write_json(out / "manifest.json", m);
  r.files.push_back("manifest.json");
  return r;
}

}  // namespace mwshape
