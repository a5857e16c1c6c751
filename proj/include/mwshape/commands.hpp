#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mwshape/config.hpp"
#include "mwshape/io.hpp"

namespace mwshape {

std::string version();

/// Files written by a command, relative to the output directory, plus a
/// short human-readable summary.
struct CommandResult {
  std::vector<std::string> files;
  std::string summary;
};

/// Observables (observables.tsv), block-averaged density map (density_map.tsv)
/// and momentum map (momentum_map.tsv); cylgpe models write cyl_widths.tsv and
/// the matched 1D run (gpe1d_widths.tsv) instead. summary.json in all cases.
CommandResult cmd_propagate(const RunConfig& config, const std::filesystem::path& out);

/// optimization.json (result and full log), evaluations.tsv.
CommandResult cmd_optimize(const RunConfig& config, const std::filesystem::path& out);

/// sensitivity.json with one entry per parameter.
CommandResult cmd_sensitivity(const RunConfig& config, const std::filesystem::path& out);

/// sweep.tsv: density_cm3, g1d_uK_um, dx_min_um, t_min_us, focus_factor; the
/// first row (density 0) is the TDSE baseline.
CommandResult cmd_sweep_density(const RunConfig& config, const std::filesystem::path& out);

/// 1D imaginary-time ground state in the configured potential, or the
/// cylindrical ground state for cylgpe models.
CommandResult cmd_ground_state(const RunConfig& config, const std::filesystem::path& out);

/// Runs a command by name and writes manifest.json listing every file with its digest.
CommandResult run_command(const std::string& name, const RunConfig& config,
                          const std::filesystem::path& out);

/// Block means of `values` (rows x cols, row-major) over at most max_rows x max_cols cells.
/// Axes are averaged the same way.
Map2D block_average(const std::vector<double>& row_axis, const std::vector<double>& col_axis,
                    const std::vector<double>& values, std::size_t max_rows, std::size_t max_cols);

}  // namespace mwshape
