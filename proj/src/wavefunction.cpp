#include "mwshape/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"

namespace mwshape {

WaveFunction::WaveFunction(Grid1D g, std::vector<cplx> amps, double t, double frame_u)
    : grid(std::move(g)), amplitudes(std::move(amps)), time(t), frame_velocity_cm_s(frame_u) {
  if (amplitudes.size() != grid.size())
    throw ContractError("WaveFunction: amplitude count does not match grid");
}

WaveFunction::WaveFunction(Grid1D g) : grid(std::move(g)), amplitudes(grid.size(), 0.0) {}

double WaveFunction::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s * grid.dx();
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> d(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), d.begin(),
                 [](const cplx& a) { return std::norm(a); });
  return d;
}

void WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("normalize: zero or non-finite norm");
  const double s = 1.0 / std::sqrt(n);
  for (auto& a : amplitudes) a *= s;
}

double WaveFunction::frame_offset() const {
  return units::cm_s_to_um_us(frame_velocity_cm_s) * time;
}

double WaveFunction::lab_position(std::size_t i) const { return grid.x(i) + frame_offset(); }

Observables observables(const WaveFunction& wf, bool with_momentum_density) {
  SpectralTransform ws(wf.grid.size());
  return observables(wf, ws, with_momentum_density);
}

Observables observables(const WaveFunction& wf, SpectralTransform& ws,
                        bool with_momentum_density) {
  const Grid1D& g = wf.grid;
  const std::size_t n = g.size();
  if (ws.size() != n || ws.batch() != 1)
    throw ContractError("observables: workspace size does not match grid");

  Observables o;
  o.time = wf.time;

  double norm_sum = 0.0;
  double x_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::norm(wf.amplitudes[i]);
    norm_sum += d;
    x_sum += d * g.x(i);
  }
  if (!(norm_sum > 0.0) || !std::isfinite(norm_sum))
    throw DomainError("observables: zero or non-finite norm");
  o.norm = norm_sum * g.dx();
  const double mean_grid_x = x_sum / norm_sum;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dxi = g.x(i) - mean_grid_x;
    var += std::norm(wf.amplitudes[i]) * dxi * dxi;
  }
  o.mean_x = mean_grid_x + wf.frame_offset();
  o.width_dx = std::sqrt(std::max(0.0, var / norm_sum));

  auto buf = ws.data();
  std::copy(wf.amplitudes.begin(), wf.amplitudes.end(), buf.begin());
  ws.forward();

  const double k_frame = units::velocity_to_wavenumber(wf.frame_velocity_cm_s);
  double pk_sum = 0.0;
  double k_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::norm(buf[i]);
    pk_sum += p;
    k_sum += p * g.k(i);
  }
  const double mean_k = k_sum / pk_sum;
  double k_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dk = g.k(i) - mean_k;
    k_var += std::norm(buf[i]) * dk * dk;
  }
  k_var /= pk_sum;
  const double lab_mean_k = mean_k + k_frame;
  o.mean_p = units::wavenumber_to_velocity(lab_mean_k);
  o.width_p = units::wavenumber_to_velocity(std::sqrt(std::max(0.0, k_var)));
  // <k^2> = var + mean^2 in the lab frame
  o.kinetic_energy =
      units::internal_to_uK(0.5 * units::hbar_over_m * (k_var + lab_mean_k * lab_mean_k));

  if (with_momentum_density) {
    // psi~(k) = dx * FFT(psi); rho(k) = |psi~|^2 / 2pi so that sum(rho) dk = norm
    const double scale = g.dx() * g.dx() / (2.0 * std::numbers::pi);
    o.momentum_density.resize(n);
    for (std::size_t i = 0; i < n; ++i) o.momentum_density[i] = std::norm(buf[i]) * scale;
  }
  return o;
}

WaveFunction gaussian_packet(const Grid1D& grid, double fwhm, double v_cm_s, double x0,
                             double frame_velocity_cm_s) {
  if (!(fwhm > 0.0)) throw DomainError("gaussian_packet: fwhm must be positive");
  const double sigma = units::fwhm_to_sigma(fwhm);
  if (x0 - 5.0 * sigma < grid.x_min() || x0 + 5.0 * sigma > grid.x_max()) {
    std::ostringstream msg;
    msg << "gaussian_packet: packet at " << x0 << " um with sigma " << sigma
        << " um needs a 5 sigma margin inside [" << grid.x_min() << ", " << grid.x_max() << "]";
    throw DomainError(msg.str());
  }
  if (sigma < 2.0 * grid.dx()) throw DomainError("gaussian_packet: grid too coarse for sigma");

  const double k0 = units::velocity_to_wavenumber(v_cm_s - frame_velocity_cm_s);
  const double amp = 1.0 / std::sqrt(sigma * std::sqrt(std::numbers::pi));
  std::vector<cplx> psi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid.x(i) - x0;
    psi[i] = amp * std::exp(-y * y / (2.0 * sigma * sigma)) * std::polar(1.0, k0 * y);
  }
  WaveFunction wf(grid, std::move(psi), 0.0, frame_velocity_cm_s);
  wf.normalize();
  return wf;
}

WaveFunction to_frame(const WaveFunction& lab, double frame_velocity_cm_s) {
  if (lab.time != 0.0 || lab.frame_velocity_cm_s != 0.0)
    throw ContractError("to_frame: expects a lab-frame state at t = 0");
  const double ku = units::velocity_to_wavenumber(frame_velocity_cm_s);
  WaveFunction out = lab;
  out.frame_velocity_cm_s = frame_velocity_cm_s;
  for (std::size_t i = 0; i < out.grid.size(); ++i)
    out.amplitudes[i] *= std::polar(1.0, -ku * out.grid.x(i));
  return out;
}

}  // namespace mwshape
