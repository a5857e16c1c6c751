#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"
#include "mwshape/wavefunction.hpp"

using namespace mwshape;

namespace {

// 87Rb: m = 86.909180527 u
constexpr double kMass = 86.909180527 * 1.66053906660e-27;
constexpr double kHbar = 1.054571817e-34;
constexpr double kBoltzmann = 1.380649e-23;

Grid1D lab_grid() { return Grid1D(-100.0, 300.0, 32768); }

}  // namespace

TEST(Units, HbarOverMass) {
  EXPECT_NEAR(units::hbar_over_m, 7.30737e-4, 1e-9);
  EXPECT_NEAR(units::rad_per_us_per_uK, 0.130920, 1e-6);
  EXPECT_DOUBLE_EQ(units::cm_s_to_um_us(10.0), 0.1);
}

TEST(Units, PacketWidthsFromFwhm) {
  const double sigma = units::fwhm_to_sigma(10.0);
  EXPECT_NEAR(sigma, 4.2466, 1e-4);
  EXPECT_NEAR(sigma / std::sqrt(2.0), 3.0028, 1e-4);
}

TEST(Packet, MomentsMatchAnalyticGaussian) {
  const auto wf = gaussian_packet(lab_grid(), 10.0, 10.0, 0.0);
  const auto o = observables(wf);
  const double sigma = units::fwhm_to_sigma(10.0);
  EXPECT_NEAR(o.norm, 1.0, 1e-12);
  EXPECT_NEAR(o.mean_x, 0.0, 1e-10);
  EXPECT_NEAR(o.width_dx, sigma / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(o.mean_p, 10.0, 1e-10);
  // dk = 1/(sqrt2 sigma)
  const double dv = kHbar / kMass / (std::sqrt(2.0) * sigma * 1e-6) * 100.0;
  EXPECT_NEAR(o.width_p, dv, 1e-8);
  // E = m (v^2 + dv^2) / 2 in uK
  const double v = 0.1, dvs = dv / 100.0;
  const double e_uK = 0.5 * kMass * (v * v + dvs * dvs) / kBoltzmann * 1e6;
  EXPECT_NEAR(o.kinetic_energy, e_uK, 1e-6 * e_uK);
}

TEST(Packet, MomentumDensityIntegratesToNorm) {
  const auto wf = gaussian_packet(lab_grid(), 10.0, 3.0, 20.0);
  const auto o = observables(wf, true);
  double s = 0.0;
  for (double d : o.momentum_density) s += d;
  EXPECT_NEAR(s * wf.grid.dk(), 1.0, 1e-12);
}

TEST(Packet, FrameChangeKeepsLabObservables) {
  const auto lab = gaussian_packet(lab_grid(), 10.0, 10.0, 5.0);
  const auto moving = to_frame(lab, 7.0);
  const auto a = observables(lab), b = observables(moving);
  EXPECT_NEAR(a.mean_x, b.mean_x, 1e-12);
  EXPECT_NEAR(a.width_dx, b.width_dx, 1e-12);
  EXPECT_NEAR(a.mean_p, b.mean_p, 1e-9);
  EXPECT_NEAR(a.width_p, b.width_p, 1e-9);
  EXPECT_NEAR(a.kinetic_energy, b.kinetic_energy, 1e-9);
}

TEST(Packet, BuiltInFrameMatchesTransformedLab) {
  const Grid1D g(-50.0, 50.0, 2048);
  const auto direct = gaussian_packet(g, 10.0, 10.0, 0.0, 10.0);
  const auto via = to_frame(gaussian_packet(g, 10.0, 10.0, 0.0), 10.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(std::abs(direct.amplitudes[i] - via.amplitudes[i]), 0.0, 1e-12);
}

TEST(Packet, LabPositionFollowsFrame) {
  WaveFunction wf(Grid1D(0.0, 10.0, 16), std::vector<cplx>(16, 1.0), 100.0, 5.0);
  EXPECT_DOUBLE_EQ(wf.frame_offset(), 5.0);
  EXPECT_DOUBLE_EQ(wf.lab_position(2), wf.grid.x(2) + 5.0);
}

TEST(Packet, Errors) {
  EXPECT_THROW(gaussian_packet(lab_grid(), 10.0, 10.0, 295.0), DomainError);
  EXPECT_THROW(gaussian_packet(Grid1D(-100, 100, 16), 10.0, 10.0, 0.0), DomainError);
  EXPECT_THROW(gaussian_packet(lab_grid(), -1.0, 10.0, 0.0), DomainError);
  EXPECT_THROW(WaveFunction(Grid1D(0, 1, 8), std::vector<cplx>(4)), ContractError);
  WaveFunction zero(Grid1D(0, 1, 8));
  EXPECT_THROW(zero.normalize(), DomainError);
  EXPECT_THROW(observables(zero), DomainError);
  auto moved = gaussian_packet(lab_grid(), 10.0, 10.0, 0.0, 3.0);
  EXPECT_THROW(to_frame(moved, 1.0), ContractError);
}
