#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mwshape/potentials.hpp"

namespace mwshape {

struct PerturbedRun {
  double scale = 1.0;
  bool ok = false;
  double value = 0.0;
  std::string error;  // set when the run failed
};

struct SensitivityEntry {
  std::string parameter;
  PerturbedRun plus;
  PerturbedRun minus;
  double mean_abs_change_percent = 0.0;  // mean over successful runs of |value - nominal|/|nominal|
  double mean_value = 0.0;               // mean metric over successful runs
};

struct SensitivityReport {
  double nominal = 0.0;
  bool raw = false;  // entries report raw metric values (stopping) rather than changes
  std::vector<SensitivityEntry> entries;
};

using Metric = std::function<double(const PotentialSpec&)>;

/// Scales each named parameter by (1 + fraction) and (1 - fraction) independently and
/// re-evaluates the metric. Failed runs are recorded with their error message.
SensitivityReport sensitivity(const PotentialSpec& optimal, const std::vector<std::string>& parameters,
                              const Metric& metric, bool raw = false, double fraction = 0.01);

}  // namespace mwshape
