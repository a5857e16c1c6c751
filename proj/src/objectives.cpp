#include "mwshape/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_snapshots(const Trajectory& traj, std::size_t n, const char* who) {
  if (traj.observables.size() < n) {
    std::ostringstream msg;
    msg << who << ": need at least " << n << " snapshots, got " << traj.observables.size();
    throw DomainError(msg.str());
  }
}

void require_switched_off(const Trajectory& traj, const PotentialSpec& potential, const char* who) {
  const double t = traj.times.back();
  const double env = switched_envelope(potential, t);
  if (env >= 1e-6) {
    std::ostringstream msg;
    msg << who << ": potential still on at window end t = " << t << " us (envelope " << env << ")";
    throw DomainError(msg.str());
  }
}

// Overlap integral of two normalized Gaussian densities exp(-x^2/s^2)/(s sqrt(pi)).
double gaussian_overlap(double sigma, double distance) {
  return std::exp(-distance * distance / (2.0 * sigma * sigma)) /
         (sigma * std::sqrt(2.0 * std::numbers::pi));
}

const WaveFunction& state_at(const Trajectory& traj, double t) {
  for (const auto& s : traj.states)
    if (std::abs(s.time - t) < 1e-6) return s;
  if (traj.final_state && std::abs(traj.final_state->time - t) < 1e-6) return *traj.final_state;
  std::ostringstream msg;
  msg << "no stored snapshot at t = " << t << " us";
  throw ContractError(msg.str());
}

}  // namespace

std::string task_name(const Task& task) {
  return std::visit(overloaded{
                        [](const FocusTask&) { return std::string("focus"); },
                        [](const AccelerateTask&) { return std::string("accelerate"); },
                        [](const ReflectTask&) { return std::string("reflect"); },
                        [](const StopTask&) { return std::string("stop"); },
                        [](const SplitTwoTask&) { return std::string("split2"); },
                        [](const SplitThreeTask&) { return std::string("split3"); },
                    },
                    task);
}

Task parse_task(const std::string& name) {
  if (name == "focus") return FocusTask{};
  if (name == "accelerate") return AccelerateTask{};
  if (name == "reflect") return ReflectTask{};
  if (name == "stop") return StopTask{};
  if (name == "split2") return SplitTwoTask{};
  if (name == "split3") return SplitThreeTask{};
  throw ContractError("unknown task '" + name + "'");
}

FocusResult focus_minimum(const Trajectory& traj) {
  require_snapshots(traj, 2, "cost_focus");
  const auto& obs = traj.observables;
  std::size_t best = 0;
  for (std::size_t i = 1; i < obs.size(); ++i)
    if (obs[i].width_dx < obs[best].width_dx) best = i;

  FocusResult r{obs[best].width_dx, traj.times[best], obs.front().width_dx};
  if (best == 0 || best + 1 == obs.size()) return r;

  // parabola through the bracketing snapshots, in coordinates relative to t_best
  const double t0 = traj.times[best - 1] - traj.times[best];
  const double t2 = traj.times[best + 1] - traj.times[best];
  const double w0 = obs[best - 1].width_dx, w1 = obs[best].width_dx, w2 = obs[best + 1].width_dx;
  const double s0 = (w0 - w1) / t0;
  const double s2 = (w2 - w1) / t2;
  const double a = (s2 - s0) / (t2 - t0);
  const double b = s0 - a * t0;
  if (a > 0.0) {
    const double tv = std::clamp(-b / (2.0 * a), t0, t2);
    r.t_min = traj.times[best] + tv;
    r.dx_min = std::min(w1, w1 + b * tv + a * tv * tv);
  }
  return r;
}

double cost_focus(const Trajectory& traj) { return focus_minimum(traj).dx_min; }

double cost_accelerate(const Trajectory& traj, const PotentialSpec& potential, double factor) {
  require_snapshots(traj, 2, "cost_accelerate");
  require_switched_off(traj, potential, "cost_accelerate");
  return std::abs(traj.observables.back().kinetic_energy -
                  factor * traj.observables.front().kinetic_energy);
}

double cost_reflect(const Trajectory& traj, const PotentialSpec& potential) {
  require_snapshots(traj, 2, "cost_reflect");
  require_switched_off(traj, potential, "cost_reflect");
  return std::abs(traj.observables.back().mean_p + traj.observables.front().mean_p);
}

double cost_stop(const Trajectory& traj, const PotentialSpec& potential) {
  require_snapshots(traj, 2, "cost_stop");
  require_switched_off(traj, potential, "cost_stop");
  return traj.observables.back().kinetic_energy / traj.observables.front().kinetic_energy;
}

PeakDecomposition decompose_peaks(const WaveFunction& wf, std::size_t expected, double smoothing) {
  const Grid1D& g = wf.grid;
  const std::size_t n = g.size();
  const auto raw = wf.density();

  SpectralTransform ws(n);
  auto buf = ws.data();
  for (std::size_t i = 0; i < n; ++i) buf[i] = raw[i];
  ws.forward();
  for (std::size_t i = 0; i < n; ++i)
    buf[i] *= std::exp(-0.5 * g.k(i) * g.k(i) * smoothing * smoothing) / static_cast<double>(n);
  ws.backward();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = buf[i].real();

  const double top = *std::max_element(s.begin(), s.end());
  const double floor = 1e-6 * top;
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i] > floor && s[i] > s[i - 1] && s[i] >= s[i + 1]) maxima.push_back(i);
  }

  auto lab = [&](std::size_t i) { return g.x(i) + wf.frame_offset(); };
  if (maxima.size() < expected) {
    std::ostringstream msg;
    msg << "decompose_peaks: expected " << expected << " peaks, found " << maxima.size();
    if (!maxima.empty()) {
      msg << " at";
      for (auto i : maxima) msg << ' ' << lab(i) << " um";
    }
    throw DomainError(msg.str());
  }

  // topographic prominence: height above the higher of the two bases
  std::vector<std::pair<double, std::size_t>> ranked;
  for (auto p : maxima) {
    double left_min = s[p];
    std::size_t i = p;
    while (i > 0 && s[i - 1] <= s[p]) left_min = std::min(left_min, s[--i]);
    if (i == 0) left_min = std::min(left_min, s[0]);
    double right_min = s[p];
    std::size_t j = p;
    while (j + 1 < n && s[j + 1] <= s[p]) right_min = std::min(right_min, s[++j]);
    ranked.emplace_back(s[p] - std::max(left_min, right_min), p);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < expected; ++i) kept.push_back(ranked[i].second);
  std::sort(kept.begin(), kept.end());

  std::vector<std::size_t> cuts{0};
  for (std::size_t m = 0; m + 1 < kept.size(); ++m) {
    auto it = std::min_element(s.begin() + static_cast<std::ptrdiff_t>(kept[m]),
                               s.begin() + static_cast<std::ptrdiff_t>(kept[m + 1]) + 1);
    cuts.push_back(static_cast<std::size_t>(it - s.begin()));
  }
  cuts.push_back(n);

  PeakDecomposition out;
  for (auto p : kept) out.peak_positions.push_back(lab(p));
  for (std::size_t c = 0; c < cuts.size(); ++c)
    out.boundaries.push_back(c + 1 == cuts.size() ? g.x_max() + wf.frame_offset() : lab(cuts[c]));
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double sum = 0.0;
    for (std::size_t i = cuts[c]; i < cuts[c + 1]; ++i) sum += raw[i];
    out.norms.push_back(sum * g.dx());
  }
  return out;
}

double split_three_deviation(const PeakDecomposition& peaks, const std::array<double, 3>& ratios) {
  if (peaks.norms.size() != 3) throw ContractError("split_three_deviation: need three peaks");
  const double total = ratios[0] + ratios[1] + ratios[2];
  double d = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double e = peaks.norms[i] - ratios[i] / total;
    d += e * e;
  }
  return std::sqrt(d);
}

double cost_split_three(const Trajectory& traj, const std::array<double, 3>& ratios,
                        double eval_time) {
  const WaveFunction& wf = state_at(traj, eval_time);
  return split_three_deviation(decompose_peaks(wf, 3), ratios);
}

double split_two_penalty(double sigma, double separation_sigmas) {
  const double d = separation_sigmas * sigma;
  const double target_sq = 0.5 * gaussian_overlap(sigma, 0.0) + 0.5 * gaussian_overlap(sigma, d);
  return 10.0 * std::sqrt(target_sq);
}

double split_two_distance(const Grid1D& g, std::span<const double> density, double sigma,
                          double separation_sigmas) {
  const std::size_t n = g.size();
  double norm = 0.0, first = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    norm += density[i];
    first += density[i] * g.x(i);
  }
  if (!(norm > 0.0)) throw DomainError("split_two_distance: zero density");
  const double centroid = first / norm;
  const double inv_norm = 1.0 / (norm * g.dx());
  const double half = 0.5 * separation_sigmas * sigma;
  const double reach = half + 12.0 * sigma;

  const std::size_t lo = g.index_of(centroid - reach - sigma);
  const std::size_t hi = g.index_of(centroid + reach + sigma);
  double outside = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < lo || i > hi) {
      const double r = density[i] * inv_norm;
      outside += r * r;
    }
  }
  const double amp = 0.5 / (sigma * std::sqrt(std::numbers::pi));
  auto distance_sq = [&](double c) {
    double s = outside;
    for (std::size_t i = lo; i <= hi; ++i) {
      const double y1 = (g.x(i) - c - half) / sigma;
      const double y2 = (g.x(i) - c + half) / sigma;
      const double r = density[i] * inv_norm - amp * (std::exp(-y1 * y1) + std::exp(-y2 * y2));
      s += r * r;
    }
    return s * g.dx();
  };

  // golden-section search for the best translation near the centroid
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = centroid - sigma, b = centroid + sigma;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = distance_sq(c), fd = distance_sq(d);
  while (b - a > 1e-7) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = distance_sq(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = distance_sq(d);
    }
  }
  return std::sqrt(std::max(0.0, std::min({fc, fd, distance_sq(centroid)})));
}

double cost_split_two(const Trajectory& traj, double sigma, double separation_sigmas) {
  if (traj.states.empty())
    throw ContractError("cost_split_two: trajectory has no stored states");
  double best = split_two_penalty(sigma, separation_sigmas);
  for (const auto& s : traj.states) {
    try {
      decompose_peaks(s, 2);
    } catch (const DomainError&) {
      continue;
    }
    const auto d = s.density();
    best = std::min(best, split_two_distance(s.grid, d, sigma, separation_sigmas));
  }
  return best;
}

double fringe_visibility(const WaveFunction& wf, double center, double half_width,
                         std::size_t oversample) {
  if (oversample < 1) throw ContractError("fringe_visibility: oversample must be >= 1");
  const Grid1D& g = wf.grid;
  const std::size_t n = g.size(), m = n * oversample;
  SpectralTransform coarse(n), fine(m);
  auto c = coarse.data();
  std::copy(wf.amplitudes.begin(), wf.amplitudes.end(), c.begin());
  coarse.forward();
  auto f = fine.data();
  std::fill(f.begin(), f.end(), cplx(0.0));
  for (std::size_t i = 0; i < n / 2; ++i) {
    f[i] = c[i];
    f[m - 1 - i] = c[n - 1 - i];
  }
  fine.backward();
  const double dxf = g.dx() / static_cast<double>(oversample);
  const double lo = center - wf.frame_offset() - half_width;
  const double hi = center - wf.frame_offset() + half_width;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double x = g.x_min() + static_cast<double>(i) * dxf;
    if (x < lo || x > hi) continue;
    const double d = std::norm(f[i]);
    mx = std::max(mx, d);
    mn = std::min(mn, d);
  }
  if (!(mx > 0.0)) return 0.0;
  return (mx - mn) / (mx + mn);
}

ObjectiveValue evaluate_objective(const ObjectiveSpec& spec, const Trajectory& traj,
                                  const PotentialSpec& potential) {
  ObjectiveValue v;
  std::visit(
      overloaded{
          [&](const FocusTask&) {
            Trajectory windowed;
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
              if (traj.times[i] >= spec.window_start - 1e-9 &&
                  traj.times[i] <= spec.window_end + 1e-9) {
                windowed.times.push_back(traj.times[i]);
                windowed.observables.push_back(traj.observables[i]);
              }
            }
            if (switched_envelope(potential, spec.window_end) >= 1e-6)
              v.warnings.push_back("focus window ends before the potential switches off");
            v.cost = cost_focus(windowed);
          },
          [&](const AccelerateTask& a) { v.cost = cost_accelerate(traj, potential, a.factor); },
          [&](const ReflectTask&) { v.cost = cost_reflect(traj, potential); },
          [&](const StopTask&) { v.cost = cost_stop(traj, potential); },
          [&](const SplitTwoTask& s) {
            const double sigma = std::sqrt(2.0) * traj.observables.front().width_dx;
            v.cost = cost_split_two(traj, sigma, s.separation_sigmas);
          },
          [&](const SplitThreeTask& s) { v.cost = cost_split_three(traj, s.ratios, s.eval_time); },
      },
      spec.task);
  return v;
}

}  // namespace mwshape
