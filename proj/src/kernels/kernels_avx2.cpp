// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants. This translation unit is compiled with -mavx2 only (no
// -mfma) so elementwise results round exactly like the scalar reference.

#include "sgl/kernels.hpp"

#if defined(SGL_HAVE_AVX2)
#include <immintrin.h>

namespace sgl::kernels {
namespace {

// (w0, w0, w1, w1) from w[k], w[k+1]
inline __m256d load_pair_weights(const double* w) {
  const __m128d w2 = _mm_loadu_pd(w);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double weighted_sum_sq(const double* xy, const double* w, std::size_t modes) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= modes; k += 2) {
    const __m256d v = _mm256_loadu_pd(xy + 2 * k);
    const __m256d wd = load_pair_weights(w + k);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wd, _mm256_mul_pd(v, v)));
  }
  double total = hsum(acc);
  for (; k < modes; ++k) {
    const double re = xy[2 * k];
    const double im = xy[2 * k + 1];
    total += w[k] * (re * re + im * im);
  }
  return total;
}

double weighted_diff_sq(const double* a, const double* b, const double* w,
                        std::size_t modes) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= modes; k += 2) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + 2 * k), _mm256_loadu_pd(b + 2 * k));
    const __m256d wd = load_pair_weights(w + k);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wd, _mm256_mul_pd(d, d)));
  }
  double total = hsum(acc);
  for (; k < modes; ++k) {
    const double dr = a[2 * k] - b[2 * k];
    const double di = a[2 * k + 1] - b[2 * k + 1];
    total += w[k] * (dr * dr + di * di);
  }
  return total;
}

void scale_modes(double* xy, const double* w, std::size_t modes) {
  std::size_t k = 0;
  for (; k + 2 <= modes; k += 2) {
    const __m256d v = _mm256_loadu_pd(xy + 2 * k);
    _mm256_storeu_pd(xy + 2 * k, _mm256_mul_pd(v, load_pair_weights(w + k)));
  }
  for (; k < modes; ++k) {
    xy[2 * k] *= w[k];
    xy[2 * k + 1] *= w[k];
  }
}

void affine_modes(double* y, const double* decay, const double* gain,
                  const double* g, std::size_t modes) {
  std::size_t k = 0;
  for (; k + 2 <= modes; k += 2) {
    const __m256d yv = _mm256_loadu_pd(y + 2 * k);
    const __m256d gv = _mm256_loadu_pd(g + 2 * k);
    const __m256d a = _mm256_mul_pd(load_pair_weights(decay + k), yv);
    const __m256d b = _mm256_mul_pd(load_pair_weights(gain + k), gv);
    _mm256_storeu_pd(y + 2 * k, _mm256_add_pd(a, b));
  }
  for (; k < modes; ++k) {
    y[2 * k] = decay[k] * y[2 * k] + gain[k] * g[2 * k];
    y[2 * k + 1] = decay[k] * y[2 * k + 1] + gain[k] * g[2 * k + 1];
  }
}

void cubic_residual(double* u, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(u + i);
    const __m256d cube = _mm256_mul_pd(_mm256_mul_pd(v, v), v);
    _mm256_storeu_pd(u + i, _mm256_sub_pd(v, cube));
  }
  for (; i < n; ++i) {
    const double v = u[i];
    u[i] = v - v * v * v;
  }
}

double sum_pow4(const double* u, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(u + i);
    const __m256d s = _mm256_mul_pd(v, v);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(s, s));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double s = u[i] * u[i];
    total += s * s;
  }
  return total;
}

double sum_sq(const double* u, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(u + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += u[i] * u[i];
  return total;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{weighted_sum_sq, weighted_diff_sq, scale_modes,
                                 affine_modes,    cubic_residual,   sum_pow4,
                                 sum_sq,          Backend::Avx2};
  return &table;
}

}  // namespace sgl::kernels

#else

namespace sgl::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace sgl::kernels

#endif
