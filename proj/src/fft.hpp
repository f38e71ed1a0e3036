// SPDX-License-Identifier: Apache-2.0
//
// Per-thread FFTW workspaces for the real DFT pair used by the spectral core.

#pragma once

#include <complex>
#include <cstddef>

namespace sgl::detail {

class RealFft {
 public:
  // Workspace of size n owned by the calling thread.
  static RealFft& for_size(std::size_t n);

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft();

  std::size_t size() const noexcept { return n_; }
  double* samples() noexcept { return real_; }
  // n/2 + 1 Hermitian half-spectrum entries.
  std::complex<double>* spectrum() noexcept { return spec_; }

  // spectrum[k] = sum_j samples[j] exp(-2 pi i j k / n), unnormalized
  void forward();
  // samples[j] = sum_k spectrum[k] exp(2 pi i j k / n) over the full
  // Hermitian spectrum; destroys spectrum contents.
  void backward();

  explicit RealFft(std::size_t n);

 private:
  std::size_t n_;
  double* real_;
  std::complex<double>* spec_;
  void* plan_fwd_;
  void* plan_bwd_;
};

}  // namespace sgl::detail
