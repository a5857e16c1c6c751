#include "mwshape/robustness.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

PerturbedRun perturbed(const PotentialSpec& spec, const std::vector<bool>& mask, double scale,
                       const Metric& metric) {
  PerturbedRun r;
  r.scale = scale;
  auto x = parameter_vector(spec, mask);
  x[0] *= scale;
  try {
    r.value = metric(with_parameters(spec, x, mask));
    r.ok = std::isfinite(r.value);
    if (!r.ok) r.error = "non-finite metric";
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

SensitivityReport sensitivity(const PotentialSpec& optimal, const std::vector<std::string>& parameters,
                              const Metric& metric, bool raw, double fraction) {
  if (!(fraction >= 0.0)) throw ContractError("sensitivity: fraction must be >= 0");
  SensitivityReport rep;
  rep.raw = raw;
  rep.nominal = metric(optimal);
  if (!std::isfinite(rep.nominal)) throw NumericalError("sensitivity: nominal run is non-finite");

  for (const auto& name : parameters) {
    const auto mask = make_mask(optimal, {name});
    SensitivityEntry e;
    e.parameter = name;
    e.plus = perturbed(optimal, mask, 1.0 + fraction, metric);
    e.minus = perturbed(optimal, mask, 1.0 - fraction, metric);
    double sum = 0.0, values = 0.0;
    int count = 0;
    for (const auto* r : {&e.plus, &e.minus}) {
      if (!r->ok) continue;
      sum += std::abs(r->value - rep.nominal);
      values += r->value;
      ++count;
    }
    e.mean_value = count == 0 ? std::numeric_limits<double>::quiet_NaN() : values / count;
    e.mean_abs_change_percent = count == 0 ? std::numeric_limits<double>::quiet_NaN()
                                           : 100.0 * sum / count / std::abs(rep.nominal);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace mwshape
