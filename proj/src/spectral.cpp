#include "mwshape/spectral.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <utility>

namespace mwshape {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralTransform::SpectralTransform(std::size_t n) : SpectralTransform(n, 1) {}

SpectralTransform::SpectralTransform(std::size_t n, std::size_t howmany)
    : n_(n), howmany_(howmany) {
  data_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n * howmany));
  if (data_ == nullptr) throw std::bad_alloc();
  for (std::size_t i = 0; i < n * howmany; ++i) data_[i] = 0.0;

  auto* buf = reinterpret_cast<fftw_complex*>(data_);
  int len = static_cast<int>(n);
  // FFTW_ESTIMATE keeps plans (and therefore results) reproducible run to run.
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), buf, nullptr, 1, len,
                                     buf, nullptr, 1, len, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), buf, nullptr, 1, len,
                                      buf, nullptr, 1, len, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() { release(); }

SpectralTransform::SpectralTransform(SpectralTransform&& o) noexcept
    : n_(std::exchange(o.n_, 0)),
      howmany_(std::exchange(o.howmany_, 1)),
      data_(std::exchange(o.data_, nullptr)),
      forward_plan_(std::exchange(o.forward_plan_, nullptr)),
      backward_plan_(std::exchange(o.backward_plan_, nullptr)) {}

SpectralTransform& SpectralTransform::operator=(SpectralTransform&& o) noexcept {
  if (this != &o) {
    release();
    n_ = std::exchange(o.n_, 0);
    howmany_ = std::exchange(o.howmany_, 1);
    data_ = std::exchange(o.data_, nullptr);
    forward_plan_ = std::exchange(o.forward_plan_, nullptr);
    backward_plan_ = std::exchange(o.backward_plan_, nullptr);
  }
  return *this;
}

void SpectralTransform::release() noexcept {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  if (data_) fftw_free(data_);
  forward_plan_ = backward_plan_ = nullptr;
  data_ = nullptr;
}

void SpectralTransform::forward() noexcept { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void SpectralTransform::backward() noexcept {
  fftw_execute(static_cast<fftw_plan>(backward_plan_));
}

}  // namespace mwshape
