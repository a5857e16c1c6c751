#include "mwshape/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

using Values = std::vector<std::string>;

const std::string& single(const std::string& key, const Values& v) {
  if (v.size() != 1) throw ConfigError(key, "expected a single value");
  return v.front();
}

double to_double(const std::string& key, const std::string& s) {
  double out = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError(key, "'" + s + "' is not a finite number");
  return out;
}

double to_double(const std::string& key, const Values& v) { return to_double(key, single(key, v)); }

std::size_t to_size(const std::string& key, const Values& v) {
  const auto& s = single(key, v);
  std::size_t out = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "'" + s + "' is not a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const Values& v) {
  const auto& s = single(key, v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "'" + s + "' is not a boolean");
}

std::vector<double> to_doubles(const std::string& key, const Values& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(to_double(key, s));
  return out;
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  return v;
}

// Applies structural keys (family, parts, center) to the potential.
void apply_structure(PotentialSpec& spec, const std::string& path, const std::string& key,
                     const Values& v) {
  const auto dot = path.find('.');
  if (dot != std::string::npos) {
    const std::string head = path.substr(0, dot);
    auto* comp = spec.get_if<Composite>();
    if (!comp || head.rfind("part", 0) != 0) throw ConfigError(key, "unknown potential key");
    std::size_t idx = 0;
    const auto* b = head.data() + 4;
    auto [p, ec] = std::from_chars(b, head.data() + head.size(), idx);
    if (ec != std::errc() || p != head.data() + head.size() || idx >= comp->parts.size())
      throw ConfigError(key, "no such composite part");
    apply_structure(comp->parts[idx], path.substr(dot + 1), key, v);
    return;
  }
  if (path == "family") {
    spec = make_family(single(key, v));
  } else if (path == "parts") {
    Composite c;
    for (const auto& name : v) {
      if (name == "composite") throw ConfigError(key, "nested composites are not supported");
      c.parts.push_back(make_family(name));
    }
    spec = std::move(c);
  } else if (path == "center") {
    auto* w = spec.get_if<CosineWell>();
    if (!w) throw ConfigError(key, "only cosine_well has a center mode");
    const auto& mode = single(key, v);
    if (mode == "fixed")
      w->center = FixedCenter{};
    else if (mode == "moving")
      w->center = MovingCenter{};
    else
      throw ConfigError(key, "expected fixed or moving");
  } else {
    throw ConfigError(key, "unknown potential key");
  }
}

bool is_structural(const std::string& path) {
  const auto last = path.substr(path.rfind('.') == std::string::npos ? 0 : path.rfind('.') + 1);
  return last == "family" || last == "parts" || last == "center";
}

void apply_grid(GridSpec& g, const std::string& field, const std::string& key, const Values& v) {
  if (field == "x_min_um")
    g.x_min = to_double(key, v);
  else if (field == "x_max_um")
    g.x_max = to_double(key, v);
  else if (field == "n_points")
    g.n_points = to_size(key, v);
  else if (field == "frame_velocity_cm_s")
    g.frame_velocity_cm_s = to_double(key, v);
  else if (field == "dt_us")
    g.dt = positive(key, to_double(key, v));
  else
    throw ConfigError(key, "unknown key");
}

void check_grid(const GridSpec& g, const std::string& key) {
  try {
    Grid1D(g.x_min, g.x_max, g.n_points);
  } catch (const std::exception& e) {
    const bool bad_n = g.n_points < 4 || !is_power_of_two(g.n_points);
    throw ConfigError(key + (bad_n ? ".n_points" : ".x_max_um"), e.what());
  }
}

}  // namespace

ConfigEntries read_config_entries(const std::filesystem::path& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path.string());
  } catch (const std::exception& e) {
    throw ConfigError(path.string(), std::string("cannot read config: ") + e.what());
  }
  ConfigEntries out;
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    std::string key;
    for (const auto& p : it.parents) key += p + ".";
    key += it.name;
    if (out.count(key)) throw ConfigError(key, "duplicate key");
    out[key] = it.inputs;
  }
  return out;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "tdse") return ModelKind::tdse;
  if (name == "tdgpe") return ModelKind::tdgpe;
  if (name == "cylgpe") return ModelKind::cylgpe;
  throw ConfigError("model.kind", "expected tdse, tdgpe or cylgpe, got '" + name + "'");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::tdse: return "tdse";
    case ModelKind::tdgpe: return "tdgpe";
    case ModelKind::cylgpe: return "cylgpe";
  }
  return "tdse";
}

PotentialSpec make_family(const std::string& name) {
  if (name == "none") return NoPotential{};
  if (name == "cosine_well") return CosineWell{};
  if (name == "triangle_splitter") return TriangleSplitter{};
  if (name == "two_ramp_splitter") return TwoRampSplitter{};
  if (name == "parabolic_wall") return ParabolicWall{};
  if (name == "harmonic") return HarmonicTrap{};
  if (name == "constant") return ConstantPotential{};
  if (name == "composite") return Composite{};
  throw ConfigError("potential.family", "unknown family '" + name + "'");
}

double model_g1d(const RunConfig& c) {
  switch (c.model.kind) {
    case ModelKind::tdse:
      return 0.0;
    case ModelKind::tdgpe:
      if (c.model.density_cm3 > 0.0)
        return g1d_from_peak_density(c.model.density_cm3, units::fwhm_to_sigma(c.scenario.packet.fwhm_um));
      return g1d_from_physical(c.model.atom_count, 2.0 * std::numbers::pi * c.model.omega_trans_hz);
    case ModelKind::cylgpe:
      return g1d_from_physical(c.model.atom_count, 2.0 * std::numbers::pi * c.model.omega_trans_hz);
  }
  return 0.0;
}

RunConfig parse_config(const ConfigEntries& entries) {
  RunConfig c;
  auto task_it = entries.find("task");
  if (task_it == entries.end()) throw ConfigError("task", "missing");
  c.task = single("task", task_it->second);
  try {
    parse_task(c.task);
  } catch (const std::exception&) {
    throw ConfigError("task", "unknown task '" + c.task + "'");
  }
  for (const auto& [k, v] : entries) {
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ", " : "") + v[i];
    c.entries[k] = joined;
  }

  Scenario& s = c.scenario;
  if (auto r = entries.find("resolution"); r != entries.end()) {
    try {
      s = task_preset(c.task, parse_resolution(single("resolution", r->second)));
    } catch (const ContractError& e) {
      throw ConfigError("resolution", e.what());
    }
  } else {
    s = task_preset(c.task);
  }

  // family, then parts, then centers
  const std::string pot = "potential.";
  for (const char* first : {"family", "parts"})
    if (auto it = entries.find(pot + first); it != entries.end()) {
      apply_structure(s.potential, first, it->first, it->second);
      s.free_parameters.clear();
      s.lower.clear();
      s.upper.clear();
    }
  for (const auto& [key, v] : entries) {
    if (key.rfind(pot, 0) != 0) continue;
    const std::string path = key.substr(pot.size());
    if (is_structural(path) && path != "family" && path != "parts") apply_structure(s.potential, path, key, v);
  }
  std::vector<std::string> names = parameter_names(s.potential);
  std::vector<double> values = parameter_vector(s.potential);

  bool free_set = false, lower_set = false, upper_set = false;
  for (const auto& [key, v] : entries) {
    if (key == "task" || key == "resolution") continue;
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? key : key.substr(0, dot);
    const std::string field = dot == std::string::npos ? "" : key.substr(dot + 1);

    if (key == "seed") {
      c.seed = to_size(key, v);
    } else if (section == "potential") {
      if (is_structural(field)) continue;
      auto it = std::find(names.begin(), names.end(), field);
      if (it == names.end()) throw ConfigError(key, "no such parameter for " + s.potential.family());
      values[static_cast<std::size_t>(it - names.begin())] = to_double(key, v);
    } else if (section == "packet") {
      if (field == "fwhm_um")
        s.packet.fwhm_um = positive(key, to_double(key, v));
      else if (field == "v_cm_s")
        s.packet.v_cm_s = to_double(key, v);
      else if (field == "x0_um")
        s.packet.x0_um = to_double(key, v);
      else
        throw ConfigError(key, "unknown key");
    } else if (section == "grid") {
      if (field.rfind("full.", 0) == 0)
        apply_grid(s.full, field.substr(5), key, v);
      else if (field.rfind("search.", 0) == 0)
        apply_grid(s.search, field.substr(7), key, v);
      else
        throw ConfigError(key, "unknown key (grid.full.* or grid.search.*)");
    } else if (section == "propagation") {
      if (field == "t_end_us") {
        s.propagation.t_end = positive(key, to_double(key, v));
      } else if (field == "snapshot_interval_us") {
        s.snapshot_interval = positive(key, to_double(key, v));
      } else if (field == "absorber") {
        s.propagation.boundary.enabled = to_bool(key, v);
      } else if (field == "absorber_width_um") {
        s.propagation.boundary.width_um = to_double(key, v);
      } else if (field == "absorber_strength") {
        s.propagation.boundary.strength = positive(key, to_double(key, v));
      } else if (field == "store_every") {
        s.propagation.store_every = to_size(key, v);
        if (s.propagation.store_every < 1) throw ConfigError(key, "must be >= 1");
      } else {
        throw ConfigError(key, "unknown key");
      }
    } else if (section == "objective") {
      if (field == "window_start_us") {
        s.objective.window_start = to_double(key, v);
      } else if (field == "window_end_us") {
        s.objective.window_end = to_double(key, v);
      } else if (field == "factor" && std::holds_alternative<AccelerateTask>(s.objective.task)) {
        std::get<AccelerateTask>(s.objective.task).factor = positive(key, to_double(key, v));
      } else if (field == "separation_sigmas" && std::holds_alternative<SplitTwoTask>(s.objective.task)) {
        std::get<SplitTwoTask>(s.objective.task).separation_sigmas = positive(key, to_double(key, v));
      } else if (field == "ratios" && std::holds_alternative<SplitThreeTask>(s.objective.task)) {
        const auto r = to_doubles(key, v);
        if (r.size() != 3) throw ConfigError(key, "expected three ratios");
        std::copy(r.begin(), r.end(), std::get<SplitThreeTask>(s.objective.task).ratios.begin());
      } else if (field == "eval_time_us" && std::holds_alternative<SplitThreeTask>(s.objective.task)) {
        std::get<SplitThreeTask>(s.objective.task).eval_time = positive(key, to_double(key, v));
      } else {
        throw ConfigError(key, "unknown key for task " + c.task);
      }
    } else if (section == "model") {
      if (field == "kind")
        c.model.kind = parse_model_kind(single(key, v));
      else if (field == "density_cm3")
        c.model.density_cm3 = to_double(key, v);
      else if (field == "atom_count")
        c.model.atom_count = to_double(key, v);
      else if (field == "omega_trans_hz")
        c.model.omega_trans_hz = to_double(key, v);
      else if (field == "radial_points")
        c.model.radial_points = to_size(key, v);
      else if (field == "r_max_factor")
        c.model.r_max_factor = positive(key, to_double(key, v));
      else if (field == "prep_points")
        c.model.prep_points = to_size(key, v);
      else
        throw ConfigError(key, "unknown key");
    } else if (section == "optimize") {
      if (field == "free") {
        s.free_parameters = v;
        free_set = true;
      } else if (field == "lower") {
        s.lower = to_doubles(key, v);
        lower_set = true;
      } else if (field == "upper") {
        s.upper = to_doubles(key, v);
        upper_set = true;
      } else if (field == "budget") {
        c.optimize.budget = to_size(key, v);
      } else if (field == "restarts") {
        c.optimize.restarts = to_size(key, v);
      } else if (field == "step_fraction") {
        c.optimize.step_fraction = positive(key, to_double(key, v));
      } else if (field == "cost_tolerance") {
        c.optimize.nelder_mead.cost_tolerance = to_double(key, v);
      } else if (field == "simplex_scale") {
        c.optimize.nelder_mead.simplex_scale = positive(key, to_double(key, v));
      } else if (field == "rescore_full") {
        c.optimize.rescore_full = to_bool(key, v);
      } else {
        throw ConfigError(key, "unknown key");
      }
    } else if (section == "sensitivity") {
      if (field == "fraction")
        c.sensitivity_fraction = positive(key, to_double(key, v));
      else if (field == "parameters")
        c.sensitivity_parameters = v;
      else
        throw ConfigError(key, "unknown key");
    } else if (section == "sweep") {
      if (field == "densities_cm3") {
        c.sweep_densities_cm3 = to_doubles(key, v);
        for (double d : c.sweep_densities_cm3)
          if (d < 0.0) throw ConfigError(key, "densities must be >= 0");
      } else {
        throw ConfigError(key, "unknown key");
      }
    } else if (section == "output") {
      if (field == "map_time_cells")
        c.output.map_time_cells = to_size(key, v);
      else if (field == "map_x_cells")
        c.output.map_x_cells = to_size(key, v);
      else if (field == "map_k_cells")
        c.output.map_k_cells = to_size(key, v);
      else if (field == "v_min_cm_s")
        c.output.v_min_cm_s = to_double(key, v);
      else if (field == "v_max_cm_s")
        c.output.v_max_cm_s = to_double(key, v);
      else if (field == "full_snapshots")
        c.output.full_snapshots = to_bool(key, v);
      else
        throw ConfigError(key, "unknown key");
    } else if (section == "ground_state") {
      auto& g = c.ground_state;
      if (field == "fwhm_um")
        g.fwhm_um = positive(key, to_double(key, v));
      else if (field == "trap_omega_rad_s")
        g.trap_omega_rad_s = to_double(key, v);
      else if (field == "x_min_um")
        g.x_min_um = to_double(key, v);
      else if (field == "x_max_um")
        g.x_max_um = to_double(key, v);
      else if (field == "n_points")
        g.n_points = to_size(key, v);
      else if (field == "tolerance")
        g.tolerance = positive(key, to_double(key, v));
      else
        throw ConfigError(key, "unknown key");
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  s.potential = with_parameters(s.potential, values);
  try {
    validate(s.potential);
  } catch (const std::exception& e) {
    throw ConfigError("potential", e.what());
  }
  try {
    make_mask(s.potential, s.free_parameters);
  } catch (const std::exception& e) {
    throw ConfigError("optimize.free", e.what());
  }
  if (free_set && !(lower_set && upper_set))
    throw ConfigError(lower_set ? "optimize.upper" : "optimize.lower", "required when optimize.free is set");
  if (s.lower.size() != s.free_parameters.size())
    throw ConfigError("optimize.lower", "needs one bound per free parameter");
  if (s.upper.size() != s.free_parameters.size())
    throw ConfigError("optimize.upper", "needs one bound per free parameter");
  for (std::size_t i = 0; i < s.lower.size(); ++i)
    if (!(s.lower[i] <= s.upper[i])) throw ConfigError("optimize.lower", "lower bound above upper bound");
  try {
    make_mask(s.potential, c.sensitivity_parameters);
  } catch (const std::exception& e) {
    throw ConfigError("sensitivity.parameters", e.what());
  }
  check_grid(s.full, "grid.full");
  check_grid(s.search, "grid.search");
  for (const GridSpec* g : {&s.full, &s.search}) {
    const double steps = s.snapshot_interval / g->dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
      throw ConfigError("propagation.snapshot_interval_us", "must be a whole number of time steps");
  }
  if (c.model.kind == ModelKind::tdgpe) {
    const bool by_density = c.model.density_cm3 > 0.0;
    const bool by_trap = c.model.atom_count > 0.0 && c.model.omega_trans_hz > 0.0;
    if (by_density == by_trap)
      throw ConfigError("model.density_cm3", "tdgpe needs either density_cm3 or atom_count with omega_trans_hz");
  }
  if (c.model.kind == ModelKind::cylgpe) {
    if (!(c.model.omega_trans_hz > 0.0)) throw ConfigError("model.omega_trans_hz", "cylgpe needs a positive value");
    if (c.model.atom_count < 0.0) throw ConfigError("model.atom_count", "must be >= 0");
    if (c.model.radial_points < 8) throw ConfigError("model.radial_points", "must be >= 8");
  }
  if (!(c.output.v_min_cm_s < c.output.v_max_cm_s))
    throw ConfigError("output.v_max_cm_s", "must exceed output.v_min_cm_s");
  for (auto cells : {c.output.map_time_cells, c.output.map_x_cells, c.output.map_k_cells})
    if (cells < 1) throw ConfigError("output", "map cell counts must be >= 1");
  s.propagation.g1d = model_g1d(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_config_entries(path)); }

std::string config_echo(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& [k, v] : config.entries) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace mwshape
