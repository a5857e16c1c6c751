#include "mwshape/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mwshape/errors.hpp"

namespace mwshape {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw DomainError("Grid1D: need finite x_min < x_max");
  if (!is_power_of_two(n_points) || n_points < 4)
    throw DomainError("Grid1D: n_points must be a power of two >= 4, got " +
                      std::to_string(n_points));
  dx_ = (x_max - x_min) / static_cast<double>(n_);
  xs_.resize(n_);
  ks_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    xs_[i] = x(i);
    ks_[i] = k(i);
  }
}

double Grid1D::dk() const noexcept { return 2.0 * std::numbers::pi / length(); }

double Grid1D::k(std::size_t i) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  auto j = static_cast<std::ptrdiff_t>(i);
  if (j >= n / 2) j -= n;
  return static_cast<double>(j) * dk();
}

std::size_t Grid1D::index_of(double xv) const noexcept {
  const double r = std::round((xv - x_min_) / dx_);
  if (r <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(r), n_ - 1);
}

}  // namespace mwshape
