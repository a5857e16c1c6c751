#include "mwshape/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"

namespace mwshape {
namespace {

std::size_t whole_steps(double span, double dt) {
  const double steps = span / dt;
  const double rounded = std::round(steps);
  if (!(dt > 0.0) || rounded < 0.0 || std::abs(steps - rounded) > 1e-6 * std::max(1.0, steps))
    throw ContractError("propagate: t_end - t must be a whole number of steps of dt");
  return static_cast<std::size_t>(rounded);
}

std::vector<double> absorber_mask(const Grid1D& g, const AbsorbingBoundary& b) {
  std::vector<double> mask(g.size(), 1.0);
  if (!b.enabled) return mask;
  const double w = b.width_um > 0.0 ? b.width_um : 0.05 * g.length();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = std::max(w - (g.x(i) - g.x_min()), w - (g.x_max() - g.x(i)));
    if (d > 0.0) mask[i] = std::pow(std::cos(0.5 * std::numbers::pi * std::min(d / w, 1.0)), b.strength);
  }
  return mask;
}

void kinetic_phases(const Grid1D& g, double dt, std::vector<cplx>& half, std::vector<cplx>& full) {
  const double inv_n = 1.0 / static_cast<double>(g.size());
  half.resize(g.size());
  full.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = 0.5 * units::hbar_over_m * g.k(i) * g.k(i);
    half[i] = std::polar(inv_n, -w * 0.5 * dt);
    full[i] = std::polar(inv_n, -w * dt);
  }
}

void apply_spectral(SpectralTransform& ws, const std::vector<cplx>& factor) {
  ws.forward();
  auto d = ws.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= factor[i];
  ws.backward();
}

bool all_finite(std::span<const cplx> d) {
  double s = 0.0;
  for (const auto& a : d) s += std::norm(a);
  return std::isfinite(s);
}

}  // namespace

Trajectory propagate(const WaveFunction& initial, const PotentialSpec& potential,
                     const PropagationConfig& config, const SnapshotObserver& observer) {
  if (config.snapshot_every < 1) throw ContractError("propagate: snapshot_every must be >= 1");
  if (config.store_every < 1) throw ContractError("propagate: store_every must be >= 1");
  if (config.g1d < 0.0) throw ContractError("propagate: g1d must be >= 0");
  validate(potential);
  if (!all_finite(initial.amplitudes)) throw DomainError("propagate: initial state has non-finite amplitudes");
  const std::size_t n_steps = whole_steps(config.t_end - initial.time, config.dt);

  const Grid1D& grid = initial.grid;
  const std::size_t n = grid.size();
  const double dt = config.dt;
  const double v_frame = units::cm_s_to_um_us(initial.frame_velocity_cm_s);
  const double g_int = units::uK_to_internal(config.g1d);
  const double v_int = units::rad_per_us_per_uK;

  SpectralTransform ws(n);
  SpectralTransform obs_ws(n);
  std::vector<cplx> half, full;
  kinetic_phases(grid, dt, half, full);
  const auto mask = absorber_mask(grid, config.boundary);
  std::vector<double> vbuf(n);
  std::vector<double> vprev(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<cplx> vphase(n, 1.0);

  auto psi = ws.data();
  std::copy(initial.amplitudes.begin(), initial.amplitudes.end(), psi.begin());

  Trajectory traj;
  WaveFunction current = initial;
  const std::size_t rim = std::max<std::size_t>(1, n / 100);
  bool touched = false;
  auto snapshot = [&](double t) {
    std::copy(psi.begin(), psi.end(), current.amplitudes.begin());
    if (!touched && !config.boundary.enabled) {
      double m = 0.0;
      for (std::size_t i = 0; i < rim; ++i) m += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
      if (m * grid.dx() > 1e-6) {
        touched = true;
        std::ostringstream msg;
        msg << "wave function reached the grid edge at t = " << t << " us (rim mass "
            << m * grid.dx() << ")";
        traj.warnings.push_back(msg.str());
      }
    }
    current.time = t;
    Observables o = observables(current, obs_ws, config.momentum_density);
    traj.times.push_back(t);
    if (observer) observer(current, o);
    traj.observables.push_back(std::move(o));
    if (config.store_states && (traj.times.size() - 1) % config.store_every == 0)
      traj.states.push_back(current);
  };

  double t = initial.time;
  snapshot(t);
  if (n_steps > 0) apply_spectral(ws, half);

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t_mid = initial.time + (static_cast<double>(step) + 0.5) * dt;
    evaluate_into(potential, grid, t_mid, v_frame * t_mid, vbuf);
    // Phase factors are cached per point and refreshed only where V changed,
    // which skips the static and constant parts of the potential.
    for (std::size_t i = 0; i < n; ++i) {
      if (vbuf[i] != vprev[i]) {
        vprev[i] = vbuf[i];
        vphase[i] = std::polar(1.0, -v_int * vbuf[i] * dt);
      }
    }
    if (g_int == 0.0) {
      for (std::size_t i = 0; i < n; ++i) psi[i] *= vphase[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double nl = g_int * std::norm(psi[i]) * dt;
        // below 1e-17 rad the extra factor rounds to 1
        psi[i] *= nl < 1e-17 ? vphase[i]
                             : std::polar(1.0, -(v_int * vbuf[i] + g_int * std::norm(psi[i])) * dt);
      }
    }
    if (config.boundary.enabled) {
      double lost = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i] < 1.0) {
          const double before = std::norm(psi[i]);
          psi[i] *= mask[i];
          lost += before - std::norm(psi[i]);
        }
      }
      traj.absorbed_norm += lost * grid.dx();
    }

    t = initial.time + static_cast<double>(step + 1) * dt;
    const bool last = step + 1 == n_steps;
    const bool snap = last || (step + 1) % config.snapshot_every == 0;
    if (snap) {
      apply_spectral(ws, half);
      if (!all_finite(psi)) {
        std::ostringstream msg;
        msg << "propagate: non-finite amplitudes at step " << step + 1 << " (t = " << t << " us)";
        throw NumericalError(msg.str());
      }
      snapshot(t);
      if (!last) apply_spectral(ws, half);
    } else {
      apply_spectral(ws, full);
      if ((step + 1) % 256 == 0 && !all_finite(psi)) {
        std::ostringstream msg;
        msg << "propagate: non-finite amplitudes at step " << step + 1 << " (t = " << t << " us)";
        throw NumericalError(msg.str());
      }
    }
  }

  if (traj.absorbed_norm > 1e-3) {
    std::ostringstream msg;
    msg << "absorbing boundary removed " << traj.absorbed_norm * 100.0 << "% of the norm";
    traj.warnings.push_back(msg.str());
  }
  traj.final_state = current;
  return traj;
}

double g1d_from_physical(double atom_count, double omega_trans_rad_s) {
  if (!(atom_count >= 0.0) || !(omega_trans_rad_s > 0.0))
    throw DomainError("g1d_from_physical: need N >= 0 and omega > 0");
  const double w = units::per_s_to_per_us(omega_trans_rad_s);
  const double a_perp = std::numbers::pi * units::hbar_over_m / w;  // um^2
  const double g = 4.0 * std::numbers::pi * units::hbar_over_m * units::scattering_length_um *
                   atom_count / a_perp;  // rad/us um
  return units::internal_to_uK(g);
}

double g1d_from_peak_density(double density_cm3, double sigma_um) {
  const double n = units::per_cm3_to_per_um3(density_cm3);
  const double peak_1d = 1.0 / (sigma_um * std::sqrt(std::numbers::pi));
  const double mean_field = 4.0 * std::numbers::pi * units::hbar_over_m *
                            units::scattering_length_um * n;  // rad/us
  return units::internal_to_uK(mean_field / peak_1d);
}

double peak_density_from_g1d(double g1d_uK_um, double sigma_um) {
  const double peak_1d = 1.0 / (sigma_um * std::sqrt(std::numbers::pi));
  const double mean_field = units::uK_to_internal(g1d_uK_um) * peak_1d;
  return units::per_um3_to_per_cm3(
      mean_field / (4.0 * std::numbers::pi * units::hbar_over_m * units::scattering_length_um));
}

EnergyParts energy(const WaveFunction& wf, const PotentialSpec& potential, double t, double g1d) {
  const Observables o = observables(wf, false);
  const Grid1D& g = wf.grid;
  std::vector<double> v(g.size());
  evaluate_into(potential, g, t, wf.frame_offset(), v);
  double pv = 0.0;
  double p4 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = std::norm(wf.amplitudes[i]);
    pv += d * v[i];
    p4 += d * d;
  }
  EnergyParts e;
  e.kinetic = o.kinetic_energy * o.norm;
  e.potential = pv * g.dx();
  e.interaction = 0.5 * g1d * p4 * g.dx();
  return e;
}

GroundStateResult imaginary_time_ground_state(const PotentialSpec& potential, double t,
                                              double g1d, const Grid1D& grid,
                                              const GroundStateOptions& opt,
                                              const std::optional<WaveFunction>& guess) {
  validate(potential);
  const std::size_t n = grid.size();
  std::vector<double> v = evaluate(potential, grid, t);
  for (auto& x : v) x = units::uK_to_internal(x);
  const double g_int = units::uK_to_internal(g1d);

  SpectralTransform ws(n);
  auto psi = ws.data();
  if (guess) {
    if (!(guess->grid == grid)) throw ContractError("ground state: guess grid mismatch");
    std::copy(guess->amplitudes.begin(), guess->amplitudes.end(), psi.begin());
  } else {
    const auto it = std::min_element(v.begin(), v.end());
    const double x0 = grid.x(static_cast<std::size_t>(it - v.begin()));
    const double s = grid.length() / 40.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = grid.x(i) - x0;
      psi[i] = std::exp(-y * y / (2.0 * s * s));
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  auto normalize = [&] {
    double s = 0.0;
    for (const auto& a : psi) s += std::norm(a);
    s *= grid.dx();
    if (!(s > 0.0) || !std::isfinite(s))
      throw NumericalError("ground state: norm collapsed to zero or non-finite");
    const double f = 1.0 / std::sqrt(s);
    for (auto& a : psi) a *= f;
  };
  normalize();

  std::vector<double> kin_half(n);
  double dtau = opt.dtau;
  auto set_kinetic = [&] {
    for (std::size_t i = 0; i < n; ++i)
      kin_half[i] = std::exp(-0.5 * units::hbar_over_m * grid.k(i) * grid.k(i) * 0.5 * dtau) * inv_n;
  };
  set_kinetic();

  // residual ||H psi - mu psi|| / |mu| with mu = <psi|H|psi>
  std::vector<cplx> hpsi(n);
  std::vector<double> density(n);
  SpectralTransform rw(n);
  auto residual = [&](double& mu_out) {
    auto r = rw.data();
    std::copy(psi.begin(), psi.end(), r.begin());
    rw.forward();
    for (std::size_t i = 0; i < n; ++i)
      r[i] *= 0.5 * units::hbar_over_m * grid.k(i) * grid.k(i) * inv_n;
    rw.backward();
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      hpsi[i] = r[i] + (v[i] + g_int * std::norm(psi[i])) * psi[i];
      mu += std::real(std::conj(psi[i]) * hpsi[i]);
    }
    mu *= grid.dx();
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(hpsi[i] - mu * psi[i]);
    mu_out = mu;
    return std::sqrt(res * grid.dx()) / std::max(std::abs(mu), 1e-300);
  };

  const std::size_t edge = std::max<std::size_t>(1, n / 20);
  double prev_res = 0.0;
  double mu = 0.0;
  std::size_t step = 0;
  while (true) {
    for (std::size_t k = 0; k < opt.check_every; ++k, ++step) {
      // nonlinear potential frozen at the step start
      for (std::size_t i = 0; i < n; ++i) density[i] = std::norm(psi[i]);
      ws.forward();
      for (std::size_t i = 0; i < n; ++i) psi[i] *= kin_half[i];
      ws.backward();
      for (std::size_t i = 0; i < n; ++i)
        psi[i] *= std::exp(-(v[i] + g_int * density[i]) * dtau);
      ws.forward();
      for (std::size_t i = 0; i < n; ++i) psi[i] *= kin_half[i];
      ws.backward();
      normalize();
    }
    double edge_mass = 0.0;
    for (std::size_t i = 0; i < edge; ++i)
      edge_mass += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
    edge_mass *= grid.dx();
    if (edge_mass > 1e-3) {
      std::ostringstream msg;
      msg << "ground state: state leaked to the grid edges (mass " << edge_mass
          << "); potential is not confining on this grid";
      throw NumericalError(msg.str());
    }
    const double res = residual(mu);
    if (!std::isfinite(res)) throw NumericalError("ground state: non-finite residual");
    if (res < opt.tolerance) break;
    if (step >= opt.max_steps) {
      std::ostringstream msg;
      msg << "ground state: no convergence after " << step << " steps, residual " << res;
      throw NumericalError(msg.str());
    }
    if (prev_res > 0.0 && res > 0.9999 * prev_res) {
      if (dtau * 0.5 < opt.min_dtau) {
        std::ostringstream msg;
        msg << "ground state: residual stalled at " << res << " with dtau " << dtau;
        throw NumericalError(msg.str());
      }
      dtau *= 0.5;
      set_kinetic();
    }
    prev_res = res;
  }

  GroundStateResult out{WaveFunction(grid, std::vector<cplx>(psi.begin(), psi.end()), t), 0.0,
                        0.0, step};
  double mu_final = 0.0;
  out.residual = residual(mu_final);
  out.energy_uK = energy(out.state, potential, t, g1d).total();
  return out;
}

}  // namespace mwshape
