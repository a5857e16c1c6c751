#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mwshape/errors.hpp"
#include "mwshape/grid.hpp"
#include "mwshape/spectral.hpp"

using namespace mwshape;

TEST(Grid, SpacingAndEndpoints) {
  Grid1D g(-10.0, 10.0, 64);
  EXPECT_DOUBLE_EQ(g.dx(), 20.0 / 64);
  EXPECT_DOUBLE_EQ(g.x(0), -10.0);
  EXPECT_DOUBLE_EQ(g.x(63), 10.0 - g.dx());
  EXPECT_EQ(g.positions().size(), 64u);
}

TEST(Grid, WavenumberOrdering) {
  Grid1D g(0.0, 2.0 * std::numbers::pi, 8);
  const double expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(g.k(i), expected[i], 1e-12) << i;
  EXPECT_NEAR(g.dk(), 1.0, 1e-12);
}

TEST(Grid, IndexOfClamps) {
  Grid1D g(0.0, 16.0, 16);
  EXPECT_EQ(g.index_of(-5.0), 0u);
  EXPECT_EQ(g.index_of(4.1), 4u);
  EXPECT_EQ(g.index_of(100.0), 15u);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(Grid1D(1.0, 1.0, 16), DomainError);
  EXPECT_THROW(Grid1D(0.0, 1.0, 2), DomainError);
  EXPECT_THROW(Grid1D(0.0, 1.0, 48), DomainError);
  EXPECT_FALSE(is_power_of_two(12));
  EXPECT_TRUE(is_power_of_two(4096));
}

TEST(Spectral, RoundTripScalesByN) {
  SpectralTransform t(32);
  auto d = t.data();
  for (std::size_t i = 0; i < 32; ++i) d[i] = cplx(std::sin(0.3 * i), std::cos(0.7 * i));
  const std::vector<cplx> orig(d.begin(), d.end());
  t.forward();
  t.backward();
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(std::abs(d[i] / 32.0 - orig[i]), 0.0, 1e-13);
}

TEST(Spectral, Parseval) {
  const std::size_t n = 1024;
  SpectralTransform t(n);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  auto d = t.data();
  double sx = 0.0;
  for (auto& z : d) {
    z = cplx(nd(rng), nd(rng));
    sx += std::norm(z);
  }
  t.forward();
  double sk = 0.0;
  for (const auto& z : d) sk += std::norm(z);
  EXPECT_NEAR(sk / n, sx, 1e-10 * sx);
}

TEST(Spectral, DerivativeOfPlaneWaveIsExact) {
  Grid1D g(0.0, 10.0, 64);
  SpectralTransform t(64);
  auto d = t.data();
  const double k = 2.0 * std::numbers::pi * 3.0 / 10.0;
  for (std::size_t i = 0; i < 64; ++i) d[i] = std::exp(cplx(0.0, k * g.x(i)));
  t.forward();
  for (std::size_t i = 0; i < 64; ++i) d[i] *= cplx(0.0, g.k(i)) / 64.0;
  t.backward();
  for (std::size_t i = 0; i < 64; ++i)
    EXPECT_NEAR(std::abs(d[i] - cplx(0.0, k) * std::exp(cplx(0.0, k * g.x(i)))), 0.0, 1e-11);
}

TEST(Spectral, BatchedRowsMatchSingleTransforms) {
  SpectralTransform batch(16, 3), single(16);
  auto b = batch.data();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = cplx(std::cos(0.1 * i * i), 0.5 * i);
  const std::vector<cplx> orig(b.begin(), b.end());
  batch.forward();
  for (std::size_t r = 0; r < 3; ++r) {
    auto s = single.data();
    std::copy(orig.begin() + r * 16, orig.begin() + (r + 1) * 16, s.begin());
    single.forward();
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(s[i], b[r * 16 + i]);
  }
}

TEST(Spectral, MovedFromIsEmpty) {
  SpectralTransform a(8);
  SpectralTransform b(std::move(a));
  EXPECT_EQ(b.size(), 8u);
  EXPECT_EQ(a.size(), 0u);
}
