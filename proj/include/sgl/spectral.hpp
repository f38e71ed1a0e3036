// SPDX-License-Identifier: Apache-2.0
//
// Mean-zero real fields on the unit torus in the Fourier basis
// e_k(xi) = exp(2 pi i k xi), and the diagonal operator A = -d^2/dxi^2 with
// eigenvalues gamma_k = 4 pi^2 k^2.
//
// Only modes k = 1..m are stored; x_{-k} = conj(x_k) is implied, so every
// field is real-valued and the k = 0 (mean) mode does not exist.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgl {

// Violated precondition of a mathematical operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// gamma_k = 4 pi^2 k^2. Throws DomainError for k == 0.
double eigenvalue(long k);

// Cached gamma_1..gamma_m (index k-1). The returned span stays valid for the
// lifetime of the program.
std::span<const double> eigenvalues(std::size_t m);

class SpectralField {
 public:
  using value_type = std::complex<double>;

  SpectralField() = default;
  // Zero field with cutoff m >= 1.
  explicit SpectralField(std::size_t m);
  // coeffs[k-1] holds x_k; size gives the cutoff. Rejects non-finite values.
  explicit SpectralField(std::vector<value_type> coeffs);

  // amplitude * sin(2 pi k xi), i.e. x_k = -i * amplitude / 2.
  static SpectralField sine(std::size_t m, std::size_t k, double amplitude);
  // amplitude * cos(2 pi k xi), i.e. x_k = amplitude / 2.
  static SpectralField cosine(std::size_t m, std::size_t k, double amplitude);

  std::size_t cutoff() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }

  // 1-based mode access, 1 <= k <= cutoff().
  value_type mode(std::size_t k) const { return coeffs_.at(k - 1); }
  void set_mode(std::size_t k, value_type v) { coeffs_.at(k - 1) = v; }

  std::span<const value_type> coeffs() const noexcept { return coeffs_; }
  std::span<value_type> coeffs() noexcept { return coeffs_; }

  // Interleaved (re, im) view for the kernels; 2 * cutoff() doubles.
  const double* raw() const noexcept {
    return reinterpret_cast<const double*>(coeffs_.data());
  }
  double* raw() noexcept { return reinterpret_cast<double*>(coeffs_.data()); }

  bool all_finite() const noexcept;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    return a += b;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    return a -= b;
  }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::vector<value_type> coeffs_;
};

// Mode k scaled by gamma_k^sigma; sigma == 0 is the identity.
SpectralField apply_fractional_power(const SpectralField& x, double sigma);

// Mode k scaled by exp(-gamma_k t). Throws DomainError for t < 0.
SpectralField apply_semigroup(const SpectralField& x, double t);

// Modes above m_keep zeroed; the cutoff is unchanged. Requires m_keep <= cutoff.
SpectralField project_galerkin(const SpectralField& x, std::size_t m_keep);

// Same field with a new cutoff: zero-padded when growing, truncated otherwise.
SpectralField with_cutoff(const SpectralField& x, std::size_t m);

// <x, y>_H = sum over k != 0 of x_k conj(y_k), real for real fields.
double inner_h(const SpectralField& x, const SpectralField& y);

double norm_h(const SpectralField& x);
double norm_v(const SpectralField& x);
// ||A^sigma x||_H
double norm_frac(const SpectralField& x, double sigma);
// ||A^sigma (x - y)||_H
double distance_frac(const SpectralField& x, const SpectralField& y, double sigma);

// Grid quadrature of the L^p norm on n_grid uniform points (0 picks 4m).
// Throws DomainError for p < 1 or an aliasing grid (n_grid < 2m + 2 or odd).
double norm_lp(const SpectralField& x, double p, std::size_t n_grid = 0);

// Samples x(j / n_grid), j = 0..n_grid-1. n_grid must be even and >= 2m + 2.
std::vector<double> to_physical(const SpectralField& x, std::size_t n_grid);
// Inverse of to_physical on band-limited samples: the mean and modes above m
// are discarded. samples.size() must be even and >= 2m + 2.
SpectralField from_physical(std::span<const double> samples, std::size_t m);

}  // namespace sgl
