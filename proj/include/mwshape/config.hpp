#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mwshape/scenario.hpp"

namespace mwshape {

enum class ModelKind { tdse, tdgpe, cylgpe };

struct ModelSpec {
  ModelKind kind = ModelKind::tdse;
  double density_cm3 = 0.0;      // tdgpe: peak density of the initial packet
  double atom_count = 0.0;       // tdgpe (with omega) or cylgpe
  double omega_trans_hz = 0.0;   // transverse trap frequency / 2pi
  std::size_t radial_points = 128;
  double r_max_factor = 6.0;     // r_max in transverse oscillator lengths
  std::size_t prep_points = 256; // longitudinal points for the cylgpe ground state
};

struct OptimizeSpec {
  std::size_t budget = 600;
  std::size_t restarts = 0;
  double step_fraction = 0.1;
  NelderMeadOptions nelder_mead;
  bool rescore_full = true;
};

struct OutputSpec {
  std::size_t map_time_cells = 500;
  std::size_t map_x_cells = 1000;
  std::size_t map_k_cells = 1000;
  double v_min_cm_s = 0.0;   // momentum map window
  double v_max_cm_s = 20.0;
  bool full_snapshots = false;
};

struct GroundStateSpec {
  double fwhm_um = 10.0;      // tunes the longitudinal trap when trap_omega_rad_s is 0
  double trap_omega_rad_s = 0.0;
  double x_min_um = -40.0;
  double x_max_um = 40.0;
  std::size_t n_points = 256;
  double tolerance = 1e-5;
};

struct RunConfig {
  std::string task;
  Scenario scenario;
  ModelSpec model;
  OptimizeSpec optimize;
  double sensitivity_fraction = 0.01;
  std::vector<std::string> sensitivity_parameters;  // empty: the free parameters
  std::vector<double> sweep_densities_cm3;
  OutputSpec output;
  GroundStateSpec ground_state;
  std::uint64_t seed = 1;
  std::map<std::string, std::string> entries;  // key -> value as read
};

using ConfigEntries = std::map<std::string, std::vector<std::string>>;

/// Reads "key = value" lines with [section] headers; keys become "section.key".
ConfigEntries read_config_entries(const std::filesystem::path& path);

/// Builds a run configuration from entries. Starts from the task preset and
/// applies every key; throws ConfigError naming the key on anything unknown
/// or malformed.
RunConfig parse_config(const ConfigEntries& entries);
RunConfig load_config(const std::filesystem::path& path);

ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind kind);

/// Default-constructed potential of a family ("cosine_well", "parabolic_wall", ...).
PotentialSpec make_family(const std::string& name);

/// 1D coupling (uK um) implied by the model for this scenario's packet.
double model_g1d(const RunConfig& config);

/// The canonical "key = value" echo of the entries, sorted by key.
std::string config_echo(const RunConfig& config);

}  // namespace mwshape
