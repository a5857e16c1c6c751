#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mwshape {

using Objective = std::function<double(std::span<const double>)>;

struct OptimizationProblem {
  Objective objective;
  std::vector<double> guess;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t budget = 600;  // max objective evaluations
};

struct NelderMeadOptions {
  double simplex_scale = 0.05;    // initial step as a fraction of the box width
  double cost_tolerance = 1e-10;  // stop when max - min cost over the simplex drops below
};

struct Evaluation {
  std::vector<double> parameters;
  double cost = 0.0;
};

struct OptimizationResult {
  std::vector<double> best_parameters;
  double best_cost = 0.0;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  bool converged = false;
  std::vector<Evaluation> log;
};

/// Throws ContractError on inconsistent bounds or a guess outside the box.
void validate(const OptimizationProblem& problem);

/// Nelder-Mead with coefficients 1, 2, 0.5, 0.5; proposals are clipped to the box
/// and non-finite costs are replaced by +inf.
OptimizationResult nelder_mead(const OptimizationProblem& problem,
                               const NelderMeadOptions& options = {});

/// Repeated Nelder-Mead runs from uniformly perturbed copies of the running best.
/// The evaluation budget is shared across restarts.
OptimizationResult random_walk_restarts(const OptimizationProblem& problem, std::size_t n_restarts,
                                        double step_fraction, std::uint64_t seed,
                                        const NelderMeadOptions& options = {});

}  // namespace mwshape
