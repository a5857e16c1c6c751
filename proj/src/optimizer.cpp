#include "mwshape/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Session {
 public:
  Session(const OptimizationProblem& p, OptimizationResult& r) : problem_(p), result_(r) {}

  bool exhausted() const { return result_.log.size() >= problem_.budget; }

  std::vector<double> clip(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::clamp(x[i], problem_.lower[i], problem_.upper[i]);
    return x;
  }

  double evaluate(const std::vector<double>& x) {
    double c = problem_.objective(std::span<const double>(x));
    if (!std::isfinite(c)) c = kInf;
    result_.log.push_back({x, c});
    result_.evaluations = result_.log.size();
    if (result_.best_parameters.empty() || c < result_.best_cost) {
      result_.best_cost = c;
      result_.best_parameters = x;
    }
    return c;
  }

 private:
  const OptimizationProblem& problem_;
  OptimizationResult& result_;
};

// One simplex descent from start; returns true on convergence.
bool descend(Session& s, const OptimizationProblem& p, const std::vector<double>& start,
             const NelderMeadOptions& o) {
  const std::size_t n = start.size();
  if (n == 0) {
    if (!s.exhausted()) s.evaluate(start);
    return true;
  }

  std::vector<std::vector<double>> v{start};
  for (std::size_t i = 0; i < n; ++i) {
    auto x = start;
    const double step = o.simplex_scale * (p.upper[i] - p.lower[i]);
    x[i] = x[i] + step <= p.upper[i] ? x[i] + step : x[i] - step;
    v.push_back(s.clip(std::move(x)));
  }
  std::vector<double> f;
  for (const auto& x : v) {
    if (s.exhausted()) return false;
    f.push_back(s.evaluate(x));
  }
  if (std::all_of(f.begin(), f.end(), [](double c) { return c == kInf; }))
    throw NumericalError("nelder_mead: objective non-finite at every simplex vertex");

  std::vector<std::size_t> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    std::vector<std::vector<double>> sv;
    std::vector<double> sf;
    for (auto i : order) {
      sv.push_back(v[i]);
      sf.push_back(f[i]);
    }
    v = std::move(sv);
    f = std::move(sf);

    if (f[n] - f[0] < o.cost_tolerance) return true;
    if (s.exhausted()) return false;

    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) c[i] += v[j][i] / static_cast<double>(n);
    auto along = [&](const std::vector<double>& from, double coef) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = c[i] + coef * (from[i] - c[i]);
      return s.clip(std::move(x));
    };

    const auto xr = along(v[n], -1.0);
    const double fr = s.evaluate(xr);
    if (fr < f[0]) {
      if (s.exhausted()) {
        v[n] = xr;
        f[n] = fr;
        continue;
      }
      const auto xe = along(xr, 2.0);
      const double fe = s.evaluate(xe);
      if (fe < fr) {
        v[n] = xe;
        f[n] = fe;
      } else {
        v[n] = xr;
        f[n] = fr;
      }
      continue;
    }
    if (fr < f[n - 1]) {
      v[n] = xr;
      f[n] = fr;
      continue;
    }
    if (s.exhausted()) continue;

    const bool outside = fr < f[n];
    const auto xc = along(outside ? xr : v[n], 0.5);
    const double fc = s.evaluate(xc);
    if (outside ? fc <= fr : fc < f[n]) {
      v[n] = xc;
      f[n] = fc;
      continue;
    }
    for (std::size_t j = 1; j <= n; ++j) {
      if (s.exhausted()) break;
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = v[0][i] + 0.5 * (v[j][i] - v[0][i]);
      v[j] = s.clip(std::move(x));
      f[j] = s.evaluate(v[j]);
    }
  }
}

}  // namespace

void validate(const OptimizationProblem& p) {
  const std::size_t n = p.guess.size();
  if (p.lower.size() != n || p.upper.size() != n)
    throw ContractError("optimizer: bounds and guess differ in length");
  if (!p.objective) throw ContractError("optimizer: no objective");
  if (p.budget == 0) throw ContractError("optimizer: budget must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream msg;
    if (!(p.lower[i] < p.upper[i])) {
      msg << "optimizer: parameter " << i << " has lo >= hi";
      throw ContractError(msg.str());
    }
    if (p.guess[i] < p.lower[i] || p.guess[i] > p.upper[i]) {
      msg << "optimizer: guess for parameter " << i << " lies outside [" << p.lower[i] << ", "
          << p.upper[i] << "]";
      throw ContractError(msg.str());
    }
  }
}

OptimizationResult nelder_mead(const OptimizationProblem& problem,
                               const NelderMeadOptions& options) {
  validate(problem);
  OptimizationResult r;
  Session s(problem, r);
  r.converged = descend(s, problem, problem.guess, options);
  return r;
}

OptimizationResult random_walk_restarts(const OptimizationProblem& problem, std::size_t n_restarts,
                                        double step_fraction, std::uint64_t seed,
                                        const NelderMeadOptions& options) {
  validate(problem);
  if (!(step_fraction >= 0.0)) throw ContractError("random_walk_restarts: step_fraction < 0");
  OptimizationResult r;
  Session s(problem, r);
  r.converged = descend(s, problem, problem.guess, options);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t k = 0; k < n_restarts && !s.exhausted(); ++k) {
    auto x = r.best_parameters;
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += unit(rng) * step_fraction * (problem.upper[i] - problem.lower[i]);
    ++r.restarts;
    r.converged = descend(s, problem, s.clip(std::move(x)), options) && r.converged;
  }
  return r;
}

}  // namespace mwshape
