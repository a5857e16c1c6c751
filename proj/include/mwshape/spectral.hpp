#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mwshape {

using cplx = std::complex<double>;

/// Owning FFTW workspace with in-place forward/backward plans.
///
/// Transforms are unnormalized (FFTW convention); backward(forward(a)) = n*a.
/// Each propagation owns its own instance. Plan creation is serialized
/// internally since the FFTW planner is not reentrant; execution is not.
class SpectralTransform {
 public:
  explicit SpectralTransform(std::size_t n);
  /// Batched transform of `howmany` contiguous rows of length n.
  SpectralTransform(std::size_t n, std::size_t howmany);
  ~SpectralTransform();

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;
  SpectralTransform(SpectralTransform&& other) noexcept;
  SpectralTransform& operator=(SpectralTransform&& other) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::size_t batch() const noexcept { return howmany_; }

  std::span<cplx> data() noexcept { return {data_, n_ * howmany_}; }
  std::span<const cplx> data() const noexcept { return {data_, n_ * howmany_}; }

  void forward() noexcept;
  void backward() noexcept;

 private:
  void release() noexcept;

  std::size_t n_ = 0;
  std::size_t howmany_ = 1;
  cplx* data_ = nullptr;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace mwshape
