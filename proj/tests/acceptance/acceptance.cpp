// Acceptance run: one PASS/FAIL line per criterion, details indented below. Exits 0.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwshape/commands.hpp"
#include "mwshape/config.hpp"
#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"
#include "mwshape/scenario.hpp"

using namespace mwshape;

namespace {

int passed = 0, failed = 0;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.summary = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  (o.pass ? passed : failed)++;
  std::printf("%s %2d %s: %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.summary.c_str(), s);
  for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }
bool within_factor(double v, double target, double factor) {
  return v >= target / factor && v <= target * factor;
}

double sigma0() { return units::fwhm_to_sigma(10.0); }

Scenario with_density(Scenario s, double density_cm3) {
  s.propagation.g1d = g1d_from_peak_density(density_cm3, sigma0());
  return s;
}

const double kGpeDensity = 1e15;  // cm^-3, the density quoted for acceleration

// 1 ------------------------------------------------------------------------
Outcome focusing() {
  const auto s = task_preset("focus");
  const auto t0 = std::chrono::steady_clock::now();
  const auto traj = run(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto f = focus_minimum(traj);
  Outcome o;
  o.pass = within(f.dx_min, 0.1079, 0.1 * 0.1079) && within(f.focus_factor(), 27.8, 2.78) && secs < 120.0;
  o.summary = "dx_min " + fmt("%.5f", f.dx_min) + " um (0.1079), F " + fmt("%.3f", f.focus_factor()) +
              " (27.8), t_min " + fmt("%.1f", f.t_min) + " us, run " + fmt("%.1f", secs) + " s (< 120)";
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome acceleration() {
  const auto s = task_preset("accelerate");
  const auto a = run(s);
  const auto b = run(with_density(s, kGpeDensity));
  const double ratio = a.observables.back().kinetic_energy / a.observables.front().kinetic_energy;
  const double target = std::sqrt(2.0) * a.observables.front().mean_p;
  const double over_se = 100.0 * (a.observables.back().mean_p / target - 1.0);
  const double over_gpe = 100.0 * (b.observables.back().mean_p / target - 1.0);
  Outcome o;
  o.pass = within(ratio, 2.0, 0.04) && within(over_gpe, 0.08, 0.1);
  o.summary = "E ratio " + fmt("%.4f", ratio) + " (2.00 +- 2%), TDGPE 1e15 overshoot " +
              fmt("%.3f", over_gpe) + " % (0.08 +- 0.1 pp)";
  o.details.push_back("TDSE overshoot of sqrt2 p0: " + fmt("%.3f", over_se) + " %");
  return o;
}

// 3 ------------------------------------------------------------------------
Outcome reflection() {
  const auto s = task_preset("reflect");
  const auto a = run(s);
  const auto b = run(with_density(s, kGpeDensity));
  const double p0 = a.observables.front().mean_p;
  const double p1 = a.observables.back().mean_p;
  const double deficit = 100.0 * (p0 - std::abs(p1)) / p0;
  const double dev = 100.0 * std::abs(b.observables.back().mean_p - p1) / std::abs(p1);
  Outcome o;
  o.pass = p1 < 0.0 && within(deficit, 0.1, 0.3) && dev < 0.05;
  o.summary = "<p> final " + fmt("%.5f", p1) + " cm/s, deficit " + fmt("%.4f", deficit) +
              " % (0.1 +- 0.3 pp), TDGPE 1e15 deviation " + fmt("%.4f", dev) + " % (< 0.05)";
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome stopping() {
  const auto s = task_preset("stop");
  const auto a = run(s);
  const auto b = run(with_density(s, kGpeDensity));
  const double rem = 100.0 * a.observables.back().kinetic_energy / a.observables.front().kinetic_energy;
  const double lower = a.observables.back().kinetic_energy - b.observables.back().kinetic_energy;
  Outcome o;
  o.pass = within(rem, 0.903, 0.3) && within(lower, 0.2, 0.15);
  o.summary = "remaining " + fmt("%.3f", rem) + " % (0.903 +- 0.3 pp), TDGPE 1e15 lower by " +
              fmt("%.3f", lower) + " uK (0.2 +- 0.15)";
  o.details.push_back("final E_kin TDSE " + fmt("%.4f", a.observables.back().kinetic_energy) +
                      " uK, TDGPE " + fmt("%.4f", b.observables.back().kinetic_energy) + " uK");
  return o;
}

// 5 ------------------------------------------------------------------------
Outcome sensitivity_tables() {
  const std::map<std::string, std::map<std::string, double>> stability{
      {"focus", {{"V0_uK", 0.147}, {"t0_us", 0.674}, {"tau_us", 0.277}}},
      {"accelerate", {{"V0_uK", 0.275}, {"t0_us", 0.130}, {"tau_us", 0.181}, {"sigma_x_um", 0.200}}},
      {"reflect", {{"V0_uK", 0.523}, {"t0_us", 0.152}, {"tau_us", 0.857}, {"sigma_x_um", 0.920}}},
  };
  Outcome o;
  int good = 0, total = 0;
  for (const auto& [task, table] : stability) {
    auto s = task_preset(task);
    std::vector<std::string> names;
    for (const auto& [p, v] : table) names.push_back(p);
    const auto rep = sensitivity(s.potential, names, target_metric(s), false);
    for (const auto& e : rep.entries) {
      const double ref = table.at(e.parameter);
      const bool ok = within_factor(e.mean_abs_change_percent, ref, 2.0);
      good += ok;
      ++total;
      o.details.push_back(task + " " + e.parameter + ": " + fmt("%.3f", e.mean_abs_change_percent) +
                          " % (" + fmt("%.3f", ref) + ")" + (ok ? "" : "  x"));
    }
  }
  const std::vector<std::pair<std::string, std::pair<double, double>>> stop{
      {"t0_us", {0.909, 0.909}}, {"tau_us", {0.912, 0.910}}, {"sigma_x_um", {0.932, 0.898}},
      {"x0_um", {0.903, 0.902}}, {"v_cm_s", {0.919, 0.890}}};
  auto s = task_preset("stop");
  std::vector<std::string> names;
  for (const auto& [p, v] : stop) names.push_back(p);
  const auto rep = sensitivity(s.potential, names, target_metric(s), true);
  o.details.push_back("stop nominal: " + fmt("%.3f", rep.nominal) + " % (0.903)");
  for (std::size_t i = 0; i < stop.size(); ++i) {
    const auto& e = rep.entries[i];
    const auto [plus, minus] = stop[i].second;
    const bool ok = e.plus.ok && e.minus.ok && within(e.plus.value, plus, 0.2) &&
                    within(e.minus.value, minus, 0.2);
    good += ok;
    ++total;
    o.details.push_back("stop " + e.parameter + ": +1% " + fmt("%.3f", e.plus.value) + " (" +
                        fmt("%.3f", plus) + "), -1% " + fmt("%.3f", e.minus.value) + " (" +
                        fmt("%.3f", minus) + ")" + (ok ? "" : "  x"));
  }
  o.pass = good == total;
  o.summary = std::to_string(good) + "/" + std::to_string(total) + " entries within tolerance";
  return o;
}

// 6 ------------------------------------------------------------------------
Outcome two_way_split() {
  const auto s = task_preset("split2");
  const auto c = split_two_crossing(s, s.potential);
  Outcome o;
  o.pass = within(c.norms[0], 0.5, 0.005) && within(c.norms[1], 0.5, 0.005) && c.visibility > 0.99 &&
           within(c.crossing_time, 405.0, 30.0);
  o.summary = "norms " + fmt("%.4f", c.norms[0]) + "/" + fmt("%.4f", c.norms[1]) + " at " +
              fmt("%.0f", c.split_time) + " us, visibility " + fmt("%.4f", c.visibility) +
              " (> 0.99), crossing " + fmt("%.1f", c.crossing_time) + " us (405 +- 30)";
  o.details.push_back("crossing at x = " + fmt("%.2f", c.position) + " um, visibility taken at " +
                      fmt("%.1f", c.visibility_time) + " us");
  return o;
}

// 7 ------------------------------------------------------------------------
Outcome three_way_split() {
  const auto s = task_preset("split3");
  const auto traj = run(s);
  const auto peaks = decompose_peaks(*traj.final_state, 3);
  const std::array<double, 3> r{4.0, 2.0, 1.0};
  bool ratios_ok = true;
  std::string ratio_text;
  for (std::size_t i = 0; i < 3; ++i) {
    const double v = 7.0 * peaks.norms[i];
    ratios_ok = ratios_ok && std::abs(v / r[i] - 1.0) <= 0.01;
    ratio_text += (i ? ":" : "") + fmt("%.3f", v);
  }
  const double dev = split_three_deviation(peaks, r);
  const auto rep = sensitivity(s.potential, {"x1_um", "x2_um"}, target_metric(s), true);
  const double x1 = rep.entries[0].mean_value;
  Outcome o;
  o.pass = ratios_ok && dev <= 5e-3 && within_factor(x1, 0.00341, 2.0);
  o.summary = "ratios " + ratio_text + " (4:2:1 +- 1%), deviation " + fmt("%.3g", dev) +
              " (<= 5e-3), x1 +-1% mean deviation " + fmt("%.4g", x1) + " (0.00341 within x2)";
  o.details.push_back("x2 +-1% mean deviation " + fmt("%.4g", rep.entries[1].mean_value) + " (0.00328)");
  return o;
}

// 8 and 9 share the density sweep ----------------------------------------------
struct SweepPoint {
  double density = 0.0;
  FocusResult focus;
};

const std::vector<double> kDensities{0.0, 1e12, 3e12, 1e13, 3e13, 1e14, 3e14, 1e15};

std::vector<SweepPoint> density_sweep() {
  std::vector<SweepPoint> out;
  const auto s = task_preset("focus", Resolution::search);
  for (double d : kDensities)
    out.push_back({d, focus_minimum(run(d > 0.0 ? with_density(s, d) : s))});
  return out;
}

Outcome bec_enhancement(const std::vector<SweepPoint>& sweep) {
  if (sweep.size() < 2) throw std::runtime_error("no density sweep");
  const double base = sweep.front().focus.focus_factor();
  bool enhanced = false, rose = false, fell_after_rise = false;
  Outcome o;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const double f = sweep[i].focus.focus_factor();
    enhanced = enhanced || f > base;
    const double prev = sweep[i - 1].focus.focus_factor();
    if (f > prev) rose = true;
    if (rose && f < prev) fell_after_rise = true;
    o.details.push_back(fmt("%.0e", sweep[i].density) + " cm^-3: F " + fmt("%.3f", f));
  }
  o.pass = enhanced && fell_after_rise;
  o.summary = std::string("TDSE F ") + fmt("%.3f", base) + ", enhancement " + (enhanced ? "yes" : "no") +
              ", non-monotone " + (fell_after_rise ? "yes" : "no");
  return o;
}

Outcome momentum_narrowing(const std::vector<SweepPoint>& sweep) {
  if (sweep.size() < 2) throw std::runtime_error("no density sweep");
  const auto best = std::max_element(sweep.begin() + 1, sweep.end(), [](const auto& a, const auto& b) {
    return a.focus.focus_factor() < b.focus.focus_factor();
  });
  const auto s = task_preset("focus", Resolution::search);
  const auto se = run(s);
  const auto gpe = run(with_density(s, best->density));
  auto nearest = [](const Trajectory& t, double time) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < t.times.size(); ++i)
      if (std::abs(t.times[i] - time) < std::abs(t.times[k] - time)) k = i;
    return k;
  };
  const std::size_t kf = nearest(gpe, best->focus.t_min);
  const double dp0 = gpe.observables.front().width_p;
  const double dpf = gpe.observables[kf].width_p;
  double lo = se.observables.front().width_p, hi = lo;
  for (const auto& ob : se.observables) {
    lo = std::min(lo, ob.width_p);
    hi = std::max(hi, ob.width_p);
  }
  const double se_change = 100.0 * (hi - lo) / se.observables.front().width_p;
  Outcome o;
  o.pass = dpf < dp0 && se_change < 1.0;
  o.summary = "density " + fmt("%.0e", best->density) + ": TDGPE dp " + fmt("%.4f", dp0) + " -> " +
              fmt("%.4f", dpf) + " cm/s at focus; TDSE dp range " + fmt("%.1f", se_change) +
              " % of initial (< 1)";
  // width around the focus, where the interaction acts
  const std::size_t k50 = nearest(gpe, best->focus.t_min - 50.0);
  const std::size_t s50 = nearest(se, best->focus.t_min - 50.0);
  const std::size_t sf = nearest(se, best->focus.t_min);
  o.details.push_back("dp at t_focus - 50 us -> t_focus: TDGPE " + fmt("%.4f", gpe.observables[k50].width_p) +
                      " -> " + fmt("%.4f", dpf) + ", TDSE " + fmt("%.4f", se.observables[s50].width_p) +
                      " -> " + fmt("%.4f", se.observables[sf].width_p) + " cm/s");
  return o;
}

// 10 -----------------------------------------------------------------------
Outcome cylindrical() {
  ConfigEntries e{{"task", {"focus"}},
                  {"resolution", {"search"}},
                  {"model.kind", {"cylgpe"}},
                  {"model.atom_count", {"1000"}},
                  {"model.omega_trans_hz", {"400"}},
                  {"model.radial_points", {"128"}},
                  {"propagation.t_end_us", {"350"}}};
  const auto out = std::filesystem::temp_directory_path() / "mwshape_acceptance_cyl";
  cmd_propagate(parse_config(e), out);
  std::ifstream in(out / "summary.json");
  const auto j = nlohmann::json::parse(in);
  const double ratio = j["dx_min_ratio"].get<double>();
  const double growth = j["transverse_growth_before_focus"].get<double>();
  Outcome o;
  o.pass = within(ratio, 1.0, 0.2) && growth < 0.25;
  o.summary = "dx_min cyl/1D " + fmt("%.3f", ratio) + " (1 +- 0.2), transverse growth " +
              fmt("%.2f", 100.0 * growth) + " % (< 25)";
  o.details.push_back("cyl dx_min " + fmt("%.4f", j["cyl_dx_min_um"].get<double>()) + " um, 1D GPE " +
                      fmt("%.4f", j["gpe1d_dx_min_um"].get<double>()) + " um, initial peak density " +
                      fmt("%.3g", j["peak_density_cm3"].get<double>()) + " cm^-3");
  return o;
}

// 11 -----------------------------------------------------------------------
PropagationConfig cfg(double dt, double t_end, std::size_t every, double g = 0.0) {
  PropagationConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_every = every;
  c.g1d = g;
  return c;
}

Outcome numerical_properties() {
  const CosineWell well{60.0, 150.0, 80.0, 40.0, 0.0, FixedCenter{10.0}};
  Outcome o;

  const auto norm_run = propagate(gaussian_packet(Grid1D(-40, 40, 256), 10.0, 0.0, 0.0),
                                  Composite{{well, HarmonicTrap{0.0, 300.0}}}, cfg(0.01, 1000.0, 1000, 0.5));
  double dn = 0.0;
  for (const auto& ob : norm_run.observables) dn = std::max(dn, std::abs(ob.norm - 1.0));

  const PotentialSpec trap = HarmonicTrap{0.0, 500.0};
  const auto wf = gaussian_packet(Grid1D(-60, 60, 1024), 10.0, 1.0, 5.0);
  double drift = 0.0;
  for (double g : {0.0, 0.3}) {
    const auto t = propagate(wf, trap, cfg(0.02, 2000.0, 100000, g));
    const double e0 = energy(wf, trap, 0.0, g).total();
    drift = std::max(drift, std::abs(energy(*t.final_state, trap, 0.0, g).total() - e0) / e0);
  }

  const auto free = propagate(gaussian_packet(Grid1D(-150, 150, 4096), 10.0, 10.0, 0.0, 10.0),
                              NoPotential{}, cfg(0.5, 600.0, 100));
  const double hbar_m = units::hbar_over_m, s = sigma0();
  double disp = 0.0;
  for (std::size_t i = 0; i < free.times.size(); ++i) {
    const double tau = hbar_m * free.times[i] / (s * s);
    disp = std::max(disp, std::abs(free.observables[i].width_dx - s / std::sqrt(2.0) * std::sqrt(1.0 + tau * tau)));
  }

  const auto start = gaussian_packet(Grid1D(-40, 40, 1024), 10.0, 10.0, 0.0, 5.0);
  const auto ref = *propagate(start, well, cfg(0.0125, 300.0, 1 << 20)).final_state;
  std::vector<double> err;
  for (double dt : {0.4, 0.2, 0.1}) {
    const auto st = *propagate(start, well, cfg(dt, 300.0, 1 << 20)).final_state;
    double m = 0.0;
    for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
      m = std::max(m, std::abs(st.amplitudes[i] - ref.amplitudes[i]));
    err.push_back(m);
  }
  const double order = std::min(std::log2(err[0] / err[1]), std::log2(err[1] / err[2]));

  const auto a = *propagate(start, well, cfg(0.05, 300.0, 1000, 0.0)).final_state;
  const auto b = *propagate(start, well, cfg(0.05, 300.0, 1000, 1e-10)).final_state;
  double dd = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    dd = std::max(dd, std::abs(std::norm(a.amplitudes[i]) - std::norm(b.amplitudes[i])));

  o.pass = dn < 1e-10 && drift < 1e-6 && disp < 1e-6 && order >= 1.9 && dd < 1e-8;
  o.summary = "norm " + fmt("%.1e", dn) + ", energy drift " + fmt("%.1e", drift) + ", dispersion " +
              fmt("%.1e", disp) + " um, order " + fmt("%.3f", order) + ", g->0 " + fmt("%.1e", dd);
  o.details.push_back("norm over 1e5 steps of 0.01 us with g1d 0.5; drift over 2000 us in a 500 rad/s trap");
  return o;
}

// 12 -----------------------------------------------------------------------
Outcome optimizer_suite() {
  OptimizationProblem bowl;
  bowl.objective = [](std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0);
  };
  bowl.guess = {3.0, 3.0};
  bowl.lower = {-5.0, -5.0};
  bowl.upper = {5.0, 5.0};
  bowl.budget = 500;
  const auto rb = nelder_mead(bowl);
  const bool bowl_ok = std::hypot(rb.best_parameters[0] - 1.0, rb.best_parameters[1] + 2.0) < 1e-4;

  OptimizationProblem rosen;
  rosen.objective = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  rosen.guess = {-1.2, 1.0};
  rosen.lower = {-3.0, -3.0};
  rosen.upper = {3.0, 3.0};
  rosen.budget = 3000;
  const auto rr = nelder_mead(rosen, {0.05, 1e-14});
  const bool rosen_ok = std::hypot(rr.best_parameters[0] - 1.0, rr.best_parameters[1] - 1.0) < 2e-3;

  const auto d1 = random_walk_restarts(rosen, 5, 0.2, 17);
  const auto d2 = random_walk_restarts(rosen, 5, 0.2, 17);
  bool same = d1.log.size() == d2.log.size();
  for (std::size_t i = 0; same && i < d1.log.size(); ++i)
    same = d1.log[i].parameters == d2.log[i].parameters && d1.log[i].cost == d2.log[i].cost;

  const auto s = task_preset("focus", Resolution::search);
  auto p = make_problem(s, 600);
  for (std::size_t i = 0; i < p.guess.size(); ++i) p.guess[i] = 0.5 * (p.lower[i] + p.upper[i]);
  const auto rf = nelder_mead(p);

  Outcome o;
  o.pass = bowl_ok && rosen_ok && same && rf.best_cost <= 0.12 && rf.evaluations <= 600;
  o.summary = std::string("bowl ") + (bowl_ok ? "ok" : "no") + ", Rosenbrock " + (rosen_ok ? "ok" : "no") +
              ", seeded logs identical " + (same ? "yes" : "no") + ", focus from box center " +
              fmt("%.4f", rf.best_cost) + " um in " + std::to_string(rf.evaluations) + " evaluations (<= 0.12)";
  std::ostringstream best;
  best << "focus optimum V0 " << rf.best_parameters[0] << " uK, t0 " << rf.best_parameters[1] << " us, tau "
       << rf.best_parameters[2] << " us";
  o.details.push_back(best.str());
  return o;
}

}  // namespace

int main() {
  std::printf("acceptance run, library %s\n", version().c_str());
  criterion(1, "focusing", focusing);
  criterion(2, "acceleration", acceleration);
  criterion(3, "reflection", reflection);
  criterion(4, "stopping", stopping);
  criterion(5, "sensitivity tables", sensitivity_tables);
  criterion(6, "two-way split", two_way_split);
  criterion(7, "three-way split", three_way_split);
  std::vector<SweepPoint> sweep;
  try {
    sweep = density_sweep();
  } catch (const std::exception& e) {
    std::printf("density sweep failed: %s\n", e.what());
  }
  criterion(8, "BEC focusing enhancement", [&] { return bec_enhancement(sweep); });
  criterion(9, "momentum narrowing", [&] { return momentum_narrowing(sweep); });
  criterion(10, "cylindrical validation", cylindrical);
  criterion(11, "numerical properties", numerical_properties);
  criterion(12, "optimizer suite", optimizer_suite);
  std::printf("%d passed, %d failed\n", passed, failed);
  return 0;
}
