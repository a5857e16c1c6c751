#pragma once

#include <cstddef>
#include <vector>

namespace mwshape {

/// Uniform periodic grid on [x_min, x_max) with its conjugate wavenumbers.
///
/// Point i sits at x_min + i*dx with dx = (x_max - x_min)/n. Wavenumbers
/// follow the usual DFT ordering: 0, dk, ..., (n/2-1)dk, -n/2 dk, ..., -dk,
/// so max |k| = pi/dx is reached at index n/2.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n_points);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double dk() const noexcept;

  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
  double k(std::size_t i) const noexcept;

  const std::vector<double>& positions() const noexcept { return xs_; }
  const std::vector<double>& wavenumbers() const noexcept { return ks_; }

  /// Nearest grid index to position x (clamped).
  std::size_t index_of(double x) const noexcept;

  bool operator==(const Grid1D& o) const noexcept {
    return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
  std::vector<double> xs_;
  std::vector<double> ks_;
};

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace mwshape
