#include "mwshape/cylgpe.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"
#include "mwshape/spectral.hpp"

namespace mwshape {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Flux-form radial Laplacian times hbar/2m on the staggered grid:
// (D psi)_j = a_j psi_{j-1} + d_j psi_j + c_j psi_{j+1}, psi_{-1} unused (a_0 = 0), psi_n = 0.
struct RadialOperator {
  std::vector<double> a, c, d;

  explicit RadialOperator(const CylGrid& g) : a(g.n_r), c(g.n_r), d(g.n_r) {
    const double kappa = 0.5 * units::hbar_over_m / (g.dr * g.dr);
    for (std::size_t j = 0; j < g.n_r; ++j) {
      const double r = g.r(j);
      a[j] = j == 0 ? 0.0 : kappa * (r - 0.5 * g.dr) / r;
      c[j] = kappa * (r + 0.5 * g.dr) / r;
      d[j] = -(a[j] + c[j]);
    }
  }
};

// Crank-Nicolson (I - alpha D) psi' = (I + alpha D) psi applied to every x line at once.
class CrankNicolson {
 public:
  CrankNicolson(const RadialOperator& op, cplx alpha, std::size_t nx)
      : op_(&op), alpha_(alpha), nx_(nx), cp_(op.a.size()), inv_(op.a.size()), orig_(nx), prev_(nx) {
    const std::size_t n = op.a.size();
    cplx last = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx sub = -alpha * op.a[j];
      const cplx diag = 1.0 - alpha * op.d[j];
      const cplx sup = -alpha * op.c[j];
      const cplx m = diag - (j == 0 ? cplx(0.0) : sub * last);
      inv_[j] = 1.0 / m;
      cp_[j] = sup * inv_[j];
      last = cp_[j];
    }
  }

  void apply(std::span<cplx> psi) {
    const std::size_t n = cp_.size();
    std::fill(prev_.begin(), prev_.end(), cplx(0.0));
    for (std::size_t j = 0; j < n; ++j) {
      cplx* row = psi.data() + j * nx_;
      const cplx* next = j + 1 < n ? psi.data() + (j + 1) * nx_ : nullptr;
      const cplx* below = j > 0 ? psi.data() + (j - 1) * nx_ : nullptr;
      const cplx ka = alpha_ * op_->a[j], kd = 1.0 + alpha_ * op_->d[j], kc = alpha_ * op_->c[j];
      const cplx sub = -alpha_ * op_->a[j];
      for (std::size_t i = 0; i < nx_; ++i) {
        const cplx o = row[i];
        cplx rhs = kd * o + ka * prev_[i];
        if (next) rhs += kc * next[i];
        if (below) rhs -= sub * below[i];
        orig_[i] = o;
        row[i] = rhs * inv_[j];
      }
      std::swap(prev_, orig_);
    }
    for (std::size_t j = n - 1; j-- > 0;) {
      cplx* row = psi.data() + j * nx_;
      const cplx* next = psi.data() + (j + 1) * nx_;
      const cplx f = cp_[j];
      for (std::size_t i = 0; i < nx_; ++i) row[i] -= f * next[i];
    }
  }

 private:
  const RadialOperator* op_;
  cplx alpha_;
  std::size_t nx_;
  std::vector<cplx> cp_, inv_;
  std::vector<cplx> orig_, prev_;
};

// exp(-h (-D + V_trap)) as a dense matrix, from the symmetrized radial operator.
class RadialExponential {
 public:
  RadialExponential(const CylGrid& g, const RadialOperator& op, double omega_rad_s) : n_(g.n_r), nx_(g.x.size()) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      b(jj, jj) = -op.d[j] + trap_value(omega_rad_s, g.r(j));
      if (j + 1 < n_) {
        const double off = -op.c[j] * std::sqrt(g.r(j) / g.r(j + 1));
        b(jj, jj + 1) = off;
        b(jj + 1, jj) = off;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
    sqrt_r_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sqrt_r_[j] = std::sqrt(g.r(j));
    scratch_.resize(n_ * nx_);
  }

  void set_step(double h) {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd e = vectors_ * (-h * values_.array()).exp().matrix().asDiagonal() * vectors_.transpose();
    m_.resize(n_ * n_);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        m_[static_cast<std::size_t>(j * n + k)] = e(j, k) * sqrt_r_[static_cast<std::size_t>(k)] /
                                                  sqrt_r_[static_cast<std::size_t>(j)];
  }

  void apply(std::span<cplx> psi) {
    std::fill(scratch_.begin(), scratch_.end(), cplx(0.0));
    for (std::size_t j = 0; j < n_; ++j) {
      cplx* out = scratch_.data() + j * nx_;
      for (std::size_t k = 0; k < n_; ++k) {
        const double w = m_[j * n_ + k];
        if (std::abs(w) < 1e-300) continue;
        const cplx* in = psi.data() + k * nx_;
        for (std::size_t i = 0; i < nx_; ++i) out[i] += w * in[i];
      }
    }
    std::copy(scratch_.begin(), scratch_.end(), psi.begin());
  }

  static double trap_value(double omega_rad_s, double r) {
    const double w = omega_rad_s * 1e-6;
    return 0.5 * w * w * r * r / units::hbar_over_m;
  }

 private:
  std::size_t n_, nx_;
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd values_;
  std::vector<double> sqrt_r_, m_;
  std::vector<cplx> scratch_;
};

double trap_internal(double omega_rad_s, double r) {
  return RadialExponential::trap_value(omega_rad_s, r);
}

void scale_all(std::span<cplx> v, double s) {
  for (auto& z : v) z *= s;
}

double weighted_norm(const CylGrid& g, std::span<const cplx> psi) {
  double total = 0.0;
  const std::size_t nx = g.x.size();
  for (std::size_t j = 0; j < g.n_r; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) row += std::norm(psi[j * nx + i]);
    total += row * g.r(j);
  }
  return kTwoPi * total * g.dr * g.x.dx();
}

// Longitudinal kinetic phases exp(-i c k^2) (or damping) for every batched line, 1/n folded in.
std::vector<cplx> kinetic_factors(const Grid1D& g, double h, bool imaginary) {
  std::vector<cplx> out(g.size());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = 0.5 * units::hbar_over_m * g.k(i) * g.k(i) * h;
    out[i] = imaginary ? cplx(std::exp(-e) * inv_n) : std::polar(inv_n, -e);
  }
  return out;
}

void apply_kinetic(SpectralTransform& ws, const std::vector<cplx>& f) {
  ws.forward();
  auto d = ws.data();
  const std::size_t nx = f.size();
  for (std::size_t b = 0; b < ws.batch(); ++b)
    for (std::size_t i = 0; i < nx; ++i) d[b * nx + i] *= f[i];
  ws.backward();
}

std::vector<double> longitudinal_internal(const PotentialSpec& p, const Grid1D& g, double t,
                                          double offset) {
  std::vector<double> v(g.size());
  evaluate_into(p, g, t, offset, v);
  for (auto& e : v) e = units::uK_to_internal(e);
  return v;
}

double rim_mass_x(const CylGrid& g, std::span<const cplx> psi) {
  const std::size_t nx = g.x.size(), rim = std::max<std::size_t>(1, nx / 100);
  double m = 0.0;
  for (std::size_t j = 0; j < g.n_r; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < rim; ++i)
      row += std::norm(psi[j * nx + i]) + std::norm(psi[j * nx + nx - 1 - i]);
    m += row * g.r(j);
  }
  return kTwoPi * m * g.dr * g.x.dx();
}

double rim_mass_r(const CylGrid& g, std::span<const cplx> psi) {
  const std::size_t nx = g.x.size(), start = g.n_r - std::max<std::size_t>(1, g.n_r / 20);
  double m = 0.0;
  for (std::size_t j = start; j < g.n_r; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) row += std::norm(psi[j * nx + i]);
    m += row * g.r(j);
  }
  return kTwoPi * m * g.dr * g.x.dx();
}

// H psi in internal units (rad/us).
void apply_hamiltonian(const CylState& s, const RadialOperator& op, const std::vector<double>& vx,
                       SpectralTransform& ws, std::vector<cplx>& out) {
  const CylGrid& g = s.grid;
  const std::size_t nx = g.x.size(), nr = g.n_r;
  const double gint = g3d_internal(s.atom_count);
  auto d = ws.data();
  std::copy(s.amplitudes.begin(), s.amplitudes.end(), d.begin());
  ws.forward();
  const double inv_n = 1.0 / static_cast<double>(nx);
  for (std::size_t j = 0; j < nr; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      d[j * nx + i] *= 0.5 * units::hbar_over_m * g.x.k(i) * g.x.k(i) * inv_n;
  ws.backward();
  out.assign(d.begin(), d.end());
  const auto& psi = s.amplitudes;
  for (std::size_t j = 0; j < nr; ++j) {
    const double vt = trap_internal(s.omega, g.r(j));
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t idx = j * nx + i;
      cplx dpsi = op.d[j] * psi[idx];
      if (j > 0) dpsi += op.a[j] * psi[idx - nx];
      if (j + 1 < nr) dpsi += op.c[j] * psi[idx + nx];
      out[idx] += -dpsi + (vx[i] + vt + gint * std::norm(psi[idx])) * psi[idx];
    }
  }
}

double weighted_inner_real(const CylGrid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const std::size_t nx = g.x.size();
  double total = 0.0;
  for (std::size_t j = 0; j < g.n_r; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) row += std::real(std::conj(a[j * nx + i]) * b[j * nx + i]);
    total += row * g.r(j);
  }
  return kTwoPi * total * g.dr * g.x.dx();
}

}  // namespace

CylGrid::CylGrid(Grid1D longitudinal, std::size_t radial_points, double r_max_um)
    : x(std::move(longitudinal)), n_r(radial_points), r_max(r_max_um) {
  if (radial_points < 4) throw DomainError("CylGrid: need at least 4 radial points");
  if (!(r_max_um > 0.0)) throw DomainError("CylGrid: r_max must be positive");
  dr = r_max / static_cast<double>(n_r);
}

CylGrid CylGrid::for_trap(Grid1D longitudinal, double omega_rad_s, std::size_t radial_points,
                          double extent) {
  if (!(omega_rad_s > 0.0)) throw DomainError("CylGrid: transverse omega must be positive");
  const double a_ho = std::sqrt(units::hbar_over_m / (omega_rad_s * 1e-6));
  return CylGrid(std::move(longitudinal), radial_points, extent * a_ho);
}

double CylState::norm() const { return weighted_norm(grid, amplitudes); }

double CylState::frame_offset() const { return units::cm_s_to_um_us(frame_velocity_cm_s) * time; }

std::vector<double> CylState::longitudinal_density() const {
  const std::size_t nx = grid.x.size();
  std::vector<double> n(nx, 0.0);
  for (std::size_t j = 0; j < grid.n_r; ++j) {
    const double w = kTwoPi * grid.r(j) * grid.dr;
    for (std::size_t i = 0; i < nx; ++i) n[i] += w * std::norm(amplitudes[j * nx + i]);
  }
  return n;
}

double CylState::peak_density_cm3() const {
  double m = 0.0;
  for (const auto& z : amplitudes) m = std::max(m, std::norm(z));
  return units::per_um3_to_per_cm3(atom_count * m);
}

double g3d_internal(double atom_count) {
  return 4.0 * std::numbers::pi * units::hbar_over_m * units::scattering_length_um * atom_count;
}

CylWidths cyl_widths(const CylState& s) {
  const CylGrid& g = s.grid;
  const std::size_t nx = g.x.size();
  const auto n = s.longitudinal_density();
  CylWidths w;
  w.time = s.time;
  double norm = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    norm += n[i];
    mx += n[i] * g.x.x(i);
  }
  mx /= norm;
  double vx = 0.0;
  for (std::size_t i = 0; i < nx; ++i) vx += n[i] * (g.x.x(i) - mx) * (g.x.x(i) - mx);
  double r2 = 0.0;
  for (std::size_t j = 0; j < g.n_r; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) row += std::norm(s.amplitudes[j * nx + i]);
    r2 += row * std::pow(g.r(j), 3);
  }
  r2 *= kTwoPi * g.dr * g.x.dx();
  w.norm = norm * g.x.dx();
  w.mean_x = mx + s.frame_offset();
  w.dx_long = std::sqrt(vx / norm);
  w.dr_trans = std::sqrt(0.5 * r2 / w.norm);
  return w;
}

double cyl_energy(const CylState& s, const PotentialSpec& longitudinal, double t) {
  const CylGrid& g = s.grid;
  RadialOperator op(g);
  SpectralTransform ws(g.x.size(), g.n_r);
  auto vx = longitudinal_internal(longitudinal, g.x, t, s.frame_offset());
  CylState lin = s;
  lin.atom_count = 0.0;
  std::vector<cplx> h;
  apply_hamiltonian(lin, op, vx, ws, h);
  double e = weighted_inner_real(g, s.amplitudes, h);
  const double gint = g3d_internal(s.atom_count);
  if (gint > 0.0) {
    const std::size_t nx = g.x.size();
    double q = 0.0;
    for (std::size_t j = 0; j < g.n_r; ++j) {
      double row = 0.0;
      for (std::size_t i = 0; i < nx; ++i) row += std::pow(std::norm(s.amplitudes[j * nx + i]), 2);
      q += row * g.r(j);
    }
    e += 0.5 * gint * kTwoPi * q * g.dr * g.x.dx();
  }
  // kinetic energy in the lab frame picks up the frame motion
  if (s.frame_velocity_cm_s != 0.0) {
    const double ku = units::velocity_to_wavenumber(s.frame_velocity_cm_s);
    SpectralTransform w2(g.x.size(), g.n_r);
    auto d = w2.data();
    std::copy(s.amplitudes.begin(), s.amplitudes.end(), d.begin());
    w2.forward();
    double num = 0.0, den = 0.0;
    const std::size_t nx = g.x.size();
    for (std::size_t j = 0; j < g.n_r; ++j) {
      double rn = 0.0, rd = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        const double p = std::norm(d[j * nx + i]);
        rn += p * g.x.k(i);
        rd += p;
      }
      num += rn * g.r(j);
      den += rd * g.r(j);
    }
    const double mean_k = num / den;
    e += units::hbar_over_m * (ku * mean_k + 0.5 * ku * ku) * s.norm();
  }
  return e / units::rad_per_us_per_uK / s.norm();
}

CylGroundState cyl_ground_state(double omega_rad_s, double atom_count,
                                const PotentialSpec& longitudinal, const CylGrid& grid,
                                const CylGroundStateOptions& opts,
                                const std::optional<CylState>& guess) {
  if (!(omega_rad_s > 0.0)) throw DomainError("cyl_ground_state: transverse omega must be positive");
  if (atom_count < 0.0) throw DomainError("cyl_ground_state: atom count must be >= 0");
  validate(longitudinal);
  const std::size_t nx = grid.x.size(), nr = grid.n_r;
  const auto vx = longitudinal_internal(longitudinal, grid.x, 0.0, 0.0);

  CylState s{grid, {}, omega_rad_s, atom_count, 0.0, 0.0};
  if (guess) {
    if (guess->amplitudes.size() != grid.size() || !(guess->grid.x == grid.x) || guess->grid.n_r != nr)
      throw ContractError("cyl_ground_state: guess grid mismatch");
    s.amplitudes = guess->amplitudes;
  } else {
    const std::size_t imin =
        static_cast<std::size_t>(std::min_element(vx.begin(), vx.end()) - vx.begin());
    const double xc = grid.x.x(imin), sx = grid.x.length() / 40.0;
    const double a2 = units::hbar_over_m / (omega_rad_s * 1e-6);
    s.amplitudes.resize(grid.size());
    for (std::size_t j = 0; j < nr; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const double dx = grid.x.x(i) - xc, r = grid.r(j);
        s.amplitudes[j * nx + i] = std::exp(-0.5 * dx * dx / (sx * sx) - 0.5 * r * r / a2);
      }
  }
  scale_all(s.amplitudes, 1.0 / std::sqrt(s.norm()));

  RadialOperator op(grid);
  SpectralTransform ws(nx, nr);
  SpectralTransform hws(nx, nr);
  const double gint = g3d_internal(atom_count);
  double h = opts.dtau;
  auto half = kinetic_factors(grid.x, 0.5 * h, true);
  RadialExponential radial(grid, op, omega_rad_s);
  radial.set_step(0.5 * h);
  double prev_res = std::numeric_limits<double>::infinity();
  std::vector<cplx> hpsi;
  std::vector<double> density(grid.size());
  auto psi = ws.data();
  std::copy(s.amplitudes.begin(), s.amplitudes.end(), psi.begin());

  for (std::size_t step = 1; step <= opts.max_steps; ++step) {
    // nonlinear potential frozen at the step start
    for (std::size_t k = 0; k < density.size(); ++k) density[k] = std::norm(psi[k]);
    apply_kinetic(ws, half);
    radial.apply(psi);
    for (std::size_t j = 0; j < nr; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        auto& z = psi[j * nx + i];
        z *= std::exp(-h * (vx[i] + gint * density[j * nx + i]));
      }
    radial.apply(psi);
    apply_kinetic(ws, half);
    scale_all(psi, 1.0 / std::sqrt(weighted_norm(grid, psi)));

    if (step % opts.check_every != 0) continue;
    std::copy(psi.begin(), psi.end(), s.amplitudes.begin());
    if (!std::all_of(s.amplitudes.begin(), s.amplitudes.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }))
      throw NumericalError("cyl_ground_state: non-finite amplitudes");
    if (rim_mass_x(grid, s.amplitudes) > 1e-3 || rim_mass_r(grid, s.amplitudes) > 1e-3)
      throw NumericalError("cyl_ground_state: state leaked to the grid edges (non-confining potential?)");
    apply_hamiltonian(s, op, vx, hws, hpsi);
    const double mu = weighted_inner_real(grid, s.amplitudes, hpsi);
    for (std::size_t k = 0; k < hpsi.size(); ++k) hpsi[k] -= mu * s.amplitudes[k];
    const double res = std::sqrt(weighted_inner_real(grid, hpsi, hpsi)) / std::abs(mu);
    if (res < opts.tolerance) {
      CylGroundState out{s, mu / units::rad_per_us_per_uK, res, step, s.peak_density_cm3()};
      return out;
    }
    if (res > 0.9999 * prev_res) {
      h *= 0.5;
      if (h < opts.min_dtau) {
        std::ostringstream msg;
        msg << "cyl_ground_state: stalled at residual " << res << " (dtau below " << opts.min_dtau << ")";
        throw NumericalError(msg.str());
      }
      half = kinetic_factors(grid.x, 0.5 * h, true);
      radial.set_step(0.5 * h);
      prev_res = std::numeric_limits<double>::infinity();
    } else {
      prev_res = res;
    }
  }
  std::copy(psi.begin(), psi.end(), s.amplitudes.begin());
  std::ostringstream msg;
  msg << "cyl_ground_state: no convergence in " << opts.max_steps << " steps (residual "
      << (std::isfinite(prev_res) ? prev_res : -1.0) << ")";
  throw NumericalError(msg.str());
}

double longitudinal_amplitude_fwhm(const CylState& s) {
  const auto n = s.longitudinal_density();
  std::vector<double> a(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) a[i] = std::sqrt(n[i]);
  const std::size_t imax = static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
  const double half = 0.5 * a[imax];
  const Grid1D& g = s.grid.x;
  std::size_t l = imax, r = imax;
  while (l > 0 && a[l] > half) --l;
  while (r + 1 < a.size() && a[r] > half) ++r;
  if (a[l] > half || a[r] > half) throw DomainError("longitudinal_amplitude_fwhm: profile not resolved");
  const double xl = g.x(l) + (half - a[l]) / (a[l + 1] - a[l]) * g.dx();
  const double xr = g.x(r - 1) + (a[r - 1] - half) / (a[r - 1] - a[r]) * g.dx();
  return xr - xl;
}

TunedGroundState cyl_ground_state_for_fwhm(double omega_rad_s, double atom_count, double fwhm_um,
                                           const CylGrid& grid, double x0_um,
                                           double fwhm_tolerance_um,
                                           const CylGroundStateOptions& options) {
  const double sigma = units::fwhm_to_sigma(fwhm_um);
  double log_w = std::log(units::hbar_over_m / (sigma * sigma) * 1e6);
  double slope = -0.6;  // d log fwhm / d log omega, refined by secant
  std::optional<CylState> warm;
  double prev_log_w = 0.0, prev_log_f = 0.0;
  for (int it = 0; it < 12; ++it) {
    auto gs = cyl_ground_state(omega_rad_s, atom_count, HarmonicTrap{x0_um, std::exp(log_w)}, grid,
                               options, warm);
    const double f = longitudinal_amplitude_fwhm(gs.state);
    if (std::abs(f - fwhm_um) < fwhm_tolerance_um) return {gs, std::exp(log_w), f};
    const double log_f = std::log(f);
    if (it > 0 && log_w != prev_log_w) {
      const double s = (log_f - prev_log_f) / (log_w - prev_log_w);
      if (s < -0.1 && s > -2.0) slope = s;
    }
    prev_log_w = log_w;
    prev_log_f = log_f;
    log_w += (std::log(fwhm_um) - log_f) / slope;
    warm = gs.state;
  }
  throw NumericalError("cyl_ground_state_for_fwhm: trap tuning did not converge");
}

CylState refine_longitudinal(const CylState& coarse, const Grid1D& fine) {
  const Grid1D& g = coarse.grid.x;
  const std::size_t nc = g.size(), nf = fine.size(), nr = coarse.grid.n_r;
  if (fine.x_min() != g.x_min() || fine.x_max() != g.x_max() || nf < nc)
    throw ContractError("refine_longitudinal: fine grid must span the same interval with more points");
  SpectralTransform cws(nc, nr), fws(nf, nr);
  auto c = cws.data();
  std::copy(coarse.amplitudes.begin(), coarse.amplitudes.end(), c.begin());
  cws.forward();
  auto f = fws.data();
  std::fill(f.begin(), f.end(), cplx(0.0));
  const double scale = 1.0 / static_cast<double>(nc);
  for (std::size_t j = 0; j < nr; ++j) {
    for (std::size_t i = 0; i < nc / 2; ++i) {
      f[j * nf + i] = c[j * nc + i] * scale;
      f[j * nf + nf - 1 - i] = c[j * nc + nc - 1 - i] * scale;
    }
  }
  fws.backward();
  CylState out = coarse;
  out.grid = CylGrid(fine, nr, coarse.grid.r_max);
  out.amplitudes.assign(f.begin(), f.end());
  scale_all(out.amplitudes, 1.0 / std::sqrt(out.norm()));
  return out;
}

CylState boost(const CylState& lab, double v_cm_s, double frame_velocity_cm_s) {
  if (lab.time != 0.0 || lab.frame_velocity_cm_s != 0.0)
    throw ContractError("boost: expects a lab-frame state at t = 0");
  CylState out = lab;
  const double k = units::velocity_to_wavenumber(v_cm_s - frame_velocity_cm_s);
  const std::size_t nx = lab.grid.x.size();
  for (std::size_t j = 0; j < lab.grid.n_r; ++j)
    for (std::size_t i = 0; i < nx; ++i) out.amplitudes[j * nx + i] *= std::polar(1.0, k * lab.grid.x.x(i));
  out.frame_velocity_cm_s = frame_velocity_cm_s;
  return out;
}

WaveFunction marginal_wavefunction(const CylState& s) {
  const auto n = s.longitudinal_density();
  std::vector<cplx> amps(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const cplx axis = s.amplitudes[i];
    const double mag = std::abs(axis);
    amps[i] = mag > 0.0 ? std::sqrt(n[i]) * axis / mag : cplx(std::sqrt(n[i]));
  }
  return WaveFunction(s.grid.x, std::move(amps), s.time, s.frame_velocity_cm_s);
}

CylTrajectory cyl_propagate(const CylState& initial, const PotentialSpec& longitudinal,
                            const CylPropagationConfig& config) {
  if (!(config.dt > 0.0)) throw ContractError("cyl_propagate: dt must be positive");
  if (config.snapshot_every < 1) throw ContractError("cyl_propagate: snapshot_every must be >= 1");
  validate(longitudinal);
  const double span = config.t_end - initial.time;
  const double steps_f = span / config.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(steps_f));
  if (span < 0.0 || std::abs(steps_f - static_cast<double>(n_steps)) > 1e-6)
    throw ContractError("cyl_propagate: t_end - t must be a whole number of steps of dt");

  const CylGrid& g = initial.grid;
  const std::size_t nx = g.x.size(), nr = g.n_r;
  const double dt = config.dt;
  const double gint = g3d_internal(initial.atom_count);
  const double v_frame = units::cm_s_to_um_us(initial.frame_velocity_cm_s);

  RadialOperator op(g);
  CrankNicolson cn(op, cplx(0.0, 0.25 * dt), nx);
  SpectralTransform ws(nx, nr);
  const auto half = kinetic_factors(g.x, 0.5 * dt, false);
  const auto full = kinetic_factors(g.x, dt, false);
  std::vector<cplx> trap_phase(nr);
  for (std::size_t j = 0; j < nr; ++j) trap_phase[j] = std::polar(1.0, -dt * trap_internal(initial.omega, g.r(j)));
  std::vector<double> vx(nx);
  std::vector<cplx> xphase(nx);

  CylTrajectory traj;
  CylState current = initial;
  auto psi = ws.data();
  std::copy(initial.amplitudes.begin(), initial.amplitudes.end(), psi.begin());
  bool touched_x = false, touched_r = false;

  auto snapshot = [&](double t) {
    std::copy(psi.begin(), psi.end(), current.amplitudes.begin());
    current.time = t;
    traj.series.push_back(cyl_widths(current));
    if (!touched_x && rim_mass_x(g, current.amplitudes) > 1e-6) {
      touched_x = true;
      std::ostringstream msg;
      msg << "wave function reached the longitudinal grid edge at t = " << t << " us";
      traj.warnings.push_back(msg.str());
    }
    if (!touched_r && rim_mass_r(g, current.amplitudes) > 1e-6) {
      touched_r = true;
      std::ostringstream msg;
      msg << "wave function reached the radial grid edge at t = " << t << " us";
      traj.warnings.push_back(msg.str());
    }
  };

  double t = initial.time;
  snapshot(t);
  if (n_steps > 0) apply_kinetic(ws, half);
  for (std::size_t step = 0; step < n_steps; ++step) {
    const double t_mid = initial.time + (static_cast<double>(step) + 0.5) * dt;
    evaluate_into(longitudinal, g.x, t_mid, v_frame * t_mid, vx);
    for (std::size_t i = 0; i < nx; ++i) xphase[i] = std::polar(1.0, -dt * units::uK_to_internal(vx[i]));
    cn.apply(psi);
    for (std::size_t j = 0; j < nr; ++j) {
      cplx* row = psi.data() + j * nx;
      const cplx tp = trap_phase[j];
      if (gint > 0.0) {
        for (std::size_t i = 0; i < nx; ++i)
          row[i] *= xphase[i] * tp * std::polar(1.0, -dt * gint * std::norm(row[i]));
      } else {
        for (std::size_t i = 0; i < nx; ++i) row[i] *= xphase[i] * tp;
      }
    }
    cn.apply(psi);

    t = initial.time + static_cast<double>(step + 1) * dt;
    const bool last = step + 1 == n_steps;
    if (last || (step + 1) % config.snapshot_every == 0) {
      apply_kinetic(ws, half);
      if (!std::all_of(psi.begin(), psi.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); })) {
        std::ostringstream msg;
        msg << "cyl_propagate: non-finite amplitudes at step " << step + 1 << " (t = " << t << " us)";
        throw NumericalError(msg.str());
      }
      snapshot(t);
      if (!last) apply_kinetic(ws, half);
    } else {
      apply_kinetic(ws, full);
    }
  }
  traj.final_state = current;
  return traj;
}

}  // namespace mwshape
