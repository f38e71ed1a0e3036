// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops shared by the spectral solver.
//
// Mode arrays are interleaved (re, im) pairs, one pair per stored Fourier
// mode, with a per-mode real weight array of the same mode count. Every
// kernel has a scalar reference implementation; an AVX2 variant is chosen at
// runtime when the CPU supports it. Elementwise kernels are bit-identical
// across backends (no FMA contraction); reductions agree to rounding.

#pragma once

#include <cstddef>
#include <string_view>

namespace sgl::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  // sum_k w[k] * (xy[2k]^2 + xy[2k+1]^2)
  double (*weighted_sum_sq)(const double* xy, const double* w, std::size_t modes);
  // sum_k w[k] * |a_k - b_k|^2
  double (*weighted_diff_sq)(const double* a, const double* b, const double* w,
                             std::size_t modes);
  // xy_k *= w[k]
  void (*scale_modes)(double* xy, const double* w, std::size_t modes);
  // y_k = decay[k] * y_k + gain[k] * g_k
  void (*affine_modes)(double* y, const double* decay, const double* gain,
                       const double* g, std::size_t modes);
  // u[i] = u[i] - u[i]^3
  void (*cubic_residual)(double* u, std::size_t n);
  // sum_i u[i]^4
  double (*sum_pow4)(const double* u, std::size_t n);
  // sum_i u[i]^2
  double (*sum_sq)(const double* u, std::size_t n);
  Backend backend;
};

const KernelTable& scalar_table();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

// Kernels in use. First call picks AVX2 when available unless the
// SGL_FORCE_SCALAR environment variable is set.
const KernelTable& active();

// Overrides the runtime choice. Returns false if the backend is unavailable.
bool set_backend(Backend b);

std::string_view backend_name(Backend b);

}  // namespace sgl::kernels
