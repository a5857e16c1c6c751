#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mwshape/constants.hpp"
#include "mwshape/errors.hpp"
#include "mwshape/propagator.hpp"

using namespace mwshape;

namespace {

constexpr double kMass = 86.909180527 * 1.66053906660e-27;
constexpr double kHbar = 1.054571817e-34;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kScattering = 95.5 * 5.29177210903e-11;

PropagationConfig config(double dt, double t_end, std::size_t every = 1000, double g = 0.0) {
  PropagationConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_every = every;
  c.g1d = g;
  return c;
}

double max_density_diff(const WaveFunction& a, const WaveFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    m = std::max(m, std::abs(std::norm(a.amplitudes[i]) - std::norm(b.amplitudes[i])));
  return m;
}

double max_amplitude_diff(const WaveFunction& a, const WaveFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    m = std::max(m, std::abs(a.amplitudes[i] - b.amplitudes[i]));
  return m;
}

// Focus-like time-dependent well on a small co-moving grid.
const PotentialSpec kWell = CosineWell{97.73, 203.4, 134.3, 50.0, 0.0, FixedCenter{13.23}};

}  // namespace

TEST(Coupling, PhysicalReduction) {
  // 4 pi hbar^2 a N / (m a_perp), a_perp = pi hbar/(m w)  ->  4 hbar a N w
  const double w = 2.0 * std::numbers::pi * 400.0;
  const double g_si = 4.0 * kHbar * kScattering * 1000.0 * w;  // J m
  const double g_uK_um = g_si / kBoltzmann * 1e6 * 1e6;
  EXPECT_NEAR(g1d_from_physical(1000.0, w), g_uK_um, 1e-9 * g_uK_um);
  EXPECT_DOUBLE_EQ(g1d_from_physical(0.0, w), 0.0);
  EXPECT_THROW(g1d_from_physical(10.0, 0.0), DomainError);
}

TEST(Coupling, PeakDensityRoundTrip) {
  const double sigma = units::fwhm_to_sigma(10.0);
  // g |psi|^2_peak = 4 pi hbar^2 a n / m
  const double n = 1e15 * 1e6;  // m^-3
  const double mu_si = 4.0 * std::numbers::pi * kHbar * kHbar * kScattering * n / kMass;
  const double mu_uK = mu_si / kBoltzmann * 1e6;
  const double g = g1d_from_peak_density(1e15, sigma);
  EXPECT_NEAR(g / (sigma * std::sqrt(std::numbers::pi)), mu_uK, 1e-9 * mu_uK);
  EXPECT_NEAR(peak_density_from_g1d(g, sigma), 1e15, 1e3);
}

TEST(Propagate, SnapshotSchedule) {
  const Grid1D g(-40, 40, 512);
  const auto wf = gaussian_packet(g, 10.0, 0.0, 0.0);
  const auto traj = propagate(wf, NoPotential{}, config(0.1, 10.0, 30));
  const std::vector<double> expected{0.0, 3.0, 6.0, 9.0, 10.0};
  ASSERT_EQ(traj.times.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(traj.times[i], expected[i], 1e-12);
  ASSERT_TRUE(traj.final_state);
  EXPECT_NEAR(traj.final_state->time, 10.0, 1e-12);
}

TEST(Propagate, StoredStatesEveryNth) {
  const Grid1D g(-40, 40, 256);
  auto c = config(0.5, 10.0, 2);
  c.store_states = true;
  c.store_every = 3;
  const auto traj = propagate(gaussian_packet(g, 10.0, 0.0, 0.0), NoPotential{}, c);
  ASSERT_EQ(traj.times.size(), 11u);
  ASSERT_EQ(traj.states.size(), 4u);
  EXPECT_NEAR(traj.states[1].time, 3.0, 1e-12);
}

TEST(Propagate, NormConservedOver1e5Steps) {
  const Grid1D g(-40, 40, 256);
  const auto wf = gaussian_packet(g, 10.0, 0.0, 0.0, 0.0);
  const auto traj = propagate(wf, Composite{{kWell, HarmonicTrap{0.0, 300.0}}}, config(0.01, 1000.0, 100000, 0.5));
  for (const auto& o : traj.observables) EXPECT_LT(std::abs(o.norm - 1.0), 1e-10);
}

TEST(Propagate, EnergyDriftStaticPotential) {
  const Grid1D g(-60, 60, 1024);
  const PotentialSpec trap = HarmonicTrap{0.0, 500.0};
  const auto wf = gaussian_packet(g, 10.0, 1.0, 5.0);
  for (double gint : {0.0, 0.3}) {
    const auto traj = propagate(wf, trap, config(0.02, 2000.0, 100000, gint));
    const double e0 = energy(wf, trap, 0.0, gint).total();
    const double e1 = energy(*traj.final_state, trap, 0.0, gint).total();
    EXPECT_LT(std::abs(e1 - e0) / e0, 1e-6) << "g1d " << gint;
  }
}

TEST(Propagate, FreeDispersionMatchesAnalytic) {
  // dx(t) = sigma/sqrt2 sqrt(1 + (hbar t / m sigma^2)^2)
  const Grid1D g(-150, 150, 4096);
  const auto wf = gaussian_packet(g, 10.0, 10.0, 0.0, 10.0);
  const auto traj = propagate(wf, NoPotential{}, config(0.5, 600.0, 100));
  const double sigma = units::fwhm_to_sigma(10.0);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i] * 1e-6;
    const double s = sigma * 1e-6;
    const double expect = sigma / std::sqrt(2.0) * std::sqrt(1.0 + std::pow(kHbar * t / (kMass * s * s), 2));
    EXPECT_NEAR(traj.observables[i].width_dx, expect, 1e-6) << traj.times[i];
    EXPECT_NEAR(traj.observables[i].mean_x, 0.1 * traj.times[i], 1e-9);
  }
}

TEST(Propagate, SecondOrderInTime) {
  const Grid1D g(-40, 40, 1024);
  const auto wf = gaussian_packet(g, 10.0, 10.0, 0.0, 5.0);
  const double t_end = 300.0;
  const auto ref = *propagate(wf, kWell, config(0.0125, t_end, 1 << 20)).final_state;
  std::vector<double> err;
  for (double dt : {0.4, 0.2, 0.1}) err.push_back(max_amplitude_diff(*propagate(wf, kWell, config(dt, t_end, 1 << 20)).final_state, ref));
  const double p1 = std::log2(err[0] / err[1]);
  const double p2 = std::log2(err[1] / err[2]);
  EXPECT_GE(p1, 1.9);
  EXPECT_GE(p2, 1.9);
}

TEST(Propagate, WeakCouplingLimit) {
  const Grid1D g(-40, 40, 1024);
  const auto wf = gaussian_packet(g, 10.0, 10.0, 0.0, 5.0);
  const auto a = propagate(wf, kWell, config(0.05, 300.0, 1000, 0.0));
  const auto b = propagate(wf, kWell, config(0.05, 300.0, 1000, 1e-10));
  EXPECT_LT(max_density_diff(*a.final_state, *b.final_state), 1e-8);
}

TEST(Propagate, GalileanFrameEquivalence) {
  const auto lab = gaussian_packet(Grid1D(-100, 300, 32768), 10.0, 10.0, 0.0);
  const auto moving = gaussian_packet(Grid1D(-40, 40, 4096), 10.0, 10.0, 0.0, 5.0);
  for (double gint : {0.0, 1.0}) {
    const auto a = propagate(lab, kWell, config(0.02, 250.0, 1250, gint));
    const auto b = propagate(moving, kWell, config(0.02, 250.0, 1250, gint));
    ASSERT_EQ(a.observables.size(), b.observables.size());
    for (std::size_t i = 0; i < a.observables.size(); ++i) {
      EXPECT_NEAR(a.observables[i].mean_x, b.observables[i].mean_x, 1e-8);
      EXPECT_NEAR(a.observables[i].width_dx, b.observables[i].width_dx, 1e-8);
      EXPECT_NEAR(a.observables[i].mean_p, b.observables[i].mean_p, 1e-8);
      EXPECT_NEAR(a.observables[i].kinetic_energy, b.observables[i].kinetic_energy, 1e-7);
    }
  }
}

TEST(Propagate, ConstantShiftIsGlobalPhase) {
  const Grid1D g(-40, 40, 512);
  const auto wf = gaussian_packet(g, 10.0, 10.0, 0.0, 5.0);
  const auto a = propagate(wf, kWell, config(0.05, 100.0, 1000));
  const auto b = propagate(wf, Composite{{kWell, ConstantPotential{7.5}}}, config(0.05, 100.0, 1000));
  EXPECT_LT(max_density_diff(*a.final_state, *b.final_state), 1e-12);
  const cplx phase = std::polar(1.0, -units::uK_to_internal(7.5) * 100.0);
  const std::size_t mid = g.size() / 2;
  EXPECT_NEAR(std::abs(b.final_state->amplitudes[mid] - phase * a.final_state->amplitudes[mid]), 0.0, 1e-10);
}

TEST(Propagate, Errors) {
  const Grid1D g(-40, 40, 256);
  const auto wf = gaussian_packet(g, 10.0, 0.0, 0.0);
  EXPECT_THROW(propagate(wf, NoPotential{}, config(0.3, 1.0)), ContractError);
  EXPECT_THROW(propagate(wf, NoPotential{}, config(0.1, 1.0, 0)), ContractError);
  EXPECT_THROW(propagate(wf, NoPotential{}, config(0.1, 1.0, 1, -1.0)), ContractError);
  EXPECT_THROW(propagate(wf, CosineWell{-1.0}, config(0.1, 1.0)), DomainError);
  auto bad = wf;
  bad.amplitudes[10] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  EXPECT_THROW(propagate(bad, NoPotential{}, config(0.1, 1.0)), DomainError);
  const PotentialSpec blowup = ConstantPotential{std::numeric_limits<double>::infinity()};
  EXPECT_THROW(propagate(wf, blowup, config(0.1, 1.0)), NumericalError);
}

TEST(Propagate, EdgeWarningAndAbsorber) {
  const Grid1D g(-40, 40, 4096);
  const auto wf = gaussian_packet(g, 10.0, 10.0, 0.0, 5.0);
  const auto open = propagate(wf, NoPotential{}, config(0.1, 600.0, 10));
  ASSERT_FALSE(open.warnings.empty());
  EXPECT_NE(open.warnings.front().find("grid edge"), std::string::npos);
  auto c = config(0.1, 1200.0, 10);
  c.boundary.enabled = true;
  const auto absorbed = propagate(wf, NoPotential{}, c);
  EXPECT_GT(absorbed.absorbed_norm, 0.5);
  EXPECT_NEAR(absorbed.observables.back().norm + absorbed.absorbed_norm, 1.0, 1e-6);
}

TEST(GroundState, HarmonicOscillator) {
  const double w = 2000.0;  // rad/s
  const Grid1D g(-30, 30, 512);
  const auto r = imaginary_time_ground_state(HarmonicTrap{0.0, w}, 0.0, 0.0, g);
  const double e_uK = 0.5 * kHbar * w / kBoltzmann * 1e6;
  EXPECT_NEAR(r.energy_uK, e_uK, 1e-8 * e_uK);
  const double width = std::sqrt(kHbar / (2.0 * kMass * w)) * 1e6;
  EXPECT_NEAR(observables(r.state, false).width_dx, width, 1e-6 * width);
}

TEST(GroundState, ThomasFermiLimit) {
  // mu = (3 g w / (4 sqrt(2 hbar/m)))^(2/3) in internal units
  const double w_rad_s = 2000.0;
  const double g_uK_um = 50.0;
  const Grid1D g(-40, 40, 1024);
  const auto r = imaginary_time_ground_state(HarmonicTrap{0.0, w_rad_s}, 0.0, g_uK_um, g);
  const double w = w_rad_s * 1e-6;
  const double gi = g_uK_um * units::rad_per_us_per_uK;
  const double mu = std::pow(3.0 * gi * w / (4.0 * std::sqrt(2.0 * units::hbar_over_m)), 2.0 / 3.0);
  const double mu_uK = mu / units::rad_per_us_per_uK;
  // E/N = 3 mu / 5 for the 1D Thomas-Fermi profile
  EXPECT_NEAR(r.energy_uK, 0.6 * mu_uK, 0.02 * mu_uK);
  const double radius = std::sqrt(2.0 * mu * units::hbar_over_m) / w;
  const auto d = r.state.density();
  const double peak = *std::max_element(d.begin(), d.end());
  EXPECT_NEAR(peak, mu / gi, 0.02 * mu / gi);
  EXPECT_LT(d[g.index_of(radius * 1.2)], 1e-3 * peak);
}

TEST(GroundState, VirialTheorem) {
  const PotentialSpec trap = HarmonicTrap{0.0, 500.0};
  const Grid1D g(-80, 80, 1024);
  for (double gint : {0.0, 2.0, 20.0}) {
    const auto r = imaginary_time_ground_state(trap, 0.0, gint, g);
    const auto e = energy(r.state, trap, 0.0, gint);
    // 1D: 2T - 2V + E_int = 0
    const double scale = e.kinetic + e.potential + e.interaction;
    EXPECT_NEAR(2.0 * e.kinetic - 2.0 * e.potential + e.interaction, 0.0, 1e-6 * scale) << gint;
  }
}

TEST(GroundState, LeakAndBudgetErrors) {
  const Grid1D g(-30, 30, 256);
  EXPECT_THROW(imaginary_time_ground_state(ConstantPotential{-1.0}, 0.0, 0.0, g), NumericalError);
  GroundStateOptions tight;
  tight.max_steps = 50;
  EXPECT_THROW(imaginary_time_ground_state(HarmonicTrap{0.0, 10.0}, 0.0, 0.0, g, tight), NumericalError);
}
