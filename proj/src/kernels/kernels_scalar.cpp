// SPDX-License-Identifier: Apache-2.0

#include "sgl/kernels.hpp"

namespace sgl::kernels {
namespace {

double weighted_sum_sq(const double* xy, const double* w, std::size_t modes) {
  double acc = 0.0;
  for (std::size_t k = 0; k < modes; ++k) {
    const double re = xy[2 * k];
    const double im = xy[2 * k + 1];
    acc += w[k] * (re * re + im * im);
  }
  return acc;
}

double weighted_diff_sq(const double* a, const double* b, const double* w,
                        std::size_t modes) {
  double acc = 0.0;
  for (std::size_t k = 0; k < modes; ++k) {
    const double dr = a[2 * k] - b[2 * k];
    const double di = a[2 * k + 1] - b[2 * k + 1];
    acc += w[k] * (dr * dr + di * di);
  }
  return acc;
}

void scale_modes(double* xy, const double* w, std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    xy[2 * k] *= w[k];
    xy[2 * k + 1] *= w[k];
  }
}

void affine_modes(double* y, const double* decay, const double* gain,
                  const double* g, std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    y[2 * k] = decay[k] * y[2 * k] + gain[k] * g[2 * k];
    y[2 * k + 1] = decay[k] * y[2 * k + 1] + gain[k] * g[2 * k + 1];
  }
}

void cubic_residual(double* u, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u[i];
    u[i] = v - v * v * v;
  }
}

double sum_pow4(const double* u, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = u[i] * u[i];
    acc += s * s;
  }
  return acc;
}

double sum_sq(const double* u, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += u[i] * u[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{weighted_sum_sq, weighted_diff_sq, scale_modes,
                                 affine_modes,    cubic_residual,   sum_pow4,
                                 sum_sq,          Backend::Scalar};
  return table;
}

}  // namespace sgl::kernels
