// SPDX-License-Identifier: Apache-2.0

#include "sgl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "fft.hpp"
#include "sgl/kernels.hpp"

namespace sgl {
namespace {

// Tables are never freed, so spans handed out remain valid.
std::span<const double> cached_table(std::size_t m, bool ones) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, bool>, std::unique_ptr<std::vector<double>>>
      tables;
  std::lock_guard lock(mu);
  auto& slot = tables[{m, ones}];
  if (!slot) {
    slot = std::make_unique<std::vector<double>>(m);
    for (std::size_t k = 1; k <= m; ++k)
      (*slot)[k - 1] = ones ? 1.0 : eigenvalue(static_cast<long>(k));
  }
  return *slot;
}

std::span<const double> ones(std::size_t m) { return cached_table(m, true); }

std::vector<double> powered_eigenvalues(std::size_t m, double sigma) {
  auto gamma = eigenvalues(m);
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = std::pow(gamma[i], sigma);
  return w;
}

void check_grid(std::size_t m, std::size_t n_grid) {
  if (n_grid < 2 * m + 2 || n_grid % 2 != 0)
    throw DomainError("grid of " + std::to_string(n_grid) +
                      " points aliases cutoff " + std::to_string(m) +
                      " (need an even size >= 2m+2)");
}

}  // namespace

double eigenvalue(long k) {
  if (k == 0) throw DomainError("eigenvalue: mode k = 0 is not in H");
  const double kk = static_cast<double>(k);
  return 4.0 * kPi * kPi * kk * kk;
}

std::span<const double> eigenvalues(std::size_t m) { return cached_table(m, false); }

SpectralField::SpectralField(std::size_t m) : coeffs_(m) {
  if (m == 0) throw DomainError("SpectralField: cutoff must be >= 1");
}

SpectralField::SpectralField(std::vector<value_type> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DomainError("SpectralField: cutoff must be >= 1");
  if (!all_finite()) throw DomainError("SpectralField: non-finite coefficient");
}

SpectralField SpectralField::sine(std::size_t m, std::size_t k, double amplitude) {
  SpectralField f(m);
  f.set_mode(k, {0.0, -0.5 * amplitude});
  return f;
}

SpectralField SpectralField::cosine(std::size_t m, std::size_t k, double amplitude) {
  SpectralField f(m);
  f.set_mode(k, {0.5 * amplitude, 0.0});
  return f;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const value_type& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.cutoff() != cutoff()) throw DomainError("SpectralField: cutoff mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (o.cutoff() != cutoff()) throw DomainError("SpectralField: cutoff mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField apply_fractional_power(const SpectralField& x, double sigma) {
  if (sigma < 0.0) throw DomainError("apply_fractional_power: sigma must be >= 0");
  if (sigma == 0.0) return x;
  SpectralField out = x;
  const auto w = powered_eigenvalues(x.cutoff(), sigma);
  kernels::active().scale_modes(out.raw(), w.data(), out.cutoff());
  return out;
}

SpectralField apply_semigroup(const SpectralField& x, double t) {
  if (t < 0.0) throw DomainError("apply_semigroup: t must be >= 0");
  if (t == 0.0) return x;
  const auto gamma = eigenvalues(x.cutoff());
  std::vector<double> w(gamma.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-gamma[i] * t);
  SpectralField out = x;
  kernels::active().scale_modes(out.raw(), w.data(), out.cutoff());
  return out;
}

SpectralField project_galerkin(const SpectralField& x, std::size_t m_keep) {
  if (m_keep > x.cutoff())
    throw DomainError("project_galerkin: target cutoff exceeds field cutoff");
  SpectralField out = x;
  auto c = out.coeffs();
  std::fill(c.begin() + static_cast<std::ptrdiff_t>(m_keep), c.end(),
            SpectralField::value_type{});
  return out;
}

SpectralField with_cutoff(const SpectralField& x, std::size_t m) {
  SpectralField out(m);
  const std::size_t n = std::min(m, x.cutoff());
  std::copy_n(x.coeffs().begin(), n, out.coeffs().begin());
  return out;
}

double inner_h(const SpectralField& x, const SpectralField& y) {
  if (x.cutoff() != y.cutoff()) throw DomainError("inner_h: cutoff mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.cutoff(); ++i) {
    const auto a = x.coeffs()[i];
    const auto b = y.coeffs()[i];
    acc += a.real() * b.real() + a.imag() * b.imag();
  }
  return 2.0 * acc;
}

double norm_h(const SpectralField& x) {
  const std::size_t m = x.cutoff();
  return std::sqrt(2.0 * kernels::active().weighted_sum_sq(x.raw(), ones(m).data(), m));
}

double norm_v(const SpectralField& x) {
  const std::size_t m = x.cutoff();
  return std::sqrt(2.0 *
                   kernels::active().weighted_sum_sq(x.raw(), eigenvalues(m).data(), m));
}

double norm_frac(const SpectralField& x, double sigma) {
  if (sigma == 0.0) return norm_h(x);
  if (sigma == 0.5) return norm_v(x);
  const std::size_t m = x.cutoff();
  const auto w = powered_eigenvalues(m, 2.0 * sigma);
  return std::sqrt(2.0 * kernels::active().weighted_sum_sq(x.raw(), w.data(), m));
}

double distance_frac(const SpectralField& x, const SpectralField& y, double sigma) {
  if (x.cutoff() != y.cutoff()) throw DomainError("distance_frac: cutoff mismatch");
  const std::size_t m = x.cutoff();
  const auto& k = kernels::active();
  if (sigma == 0.0) return std::sqrt(2.0 * k.weighted_diff_sq(x.raw(), y.raw(), ones(m).data(), m));
  if (sigma == 0.5)
    return std::sqrt(2.0 * k.weighted_diff_sq(x.raw(), y.raw(), eigenvalues(m).data(), m));
  const auto w = powered_eigenvalues(m, 2.0 * sigma);
  return std::sqrt(2.0 * k.weighted_diff_sq(x.raw(), y.raw(), w.data(), m));
}

double norm_lp(const SpectralField& x, double p, std::size_t n_grid) {
  if (!(p >= 1.0)) throw DomainError("norm_lp: p must be >= 1");
  if (n_grid == 0) n_grid = 4 * x.cutoff();
  const auto u = to_physical(x, n_grid);
  const auto& k = kernels::active();
  const double n = static_cast<double>(n_grid);
  if (p == 2.0) return std::sqrt(k.sum_sq(u.data(), u.size()) / n);
  if (p == 4.0) return std::pow(k.sum_pow4(u.data(), u.size()) / n, 0.25);
  double acc = 0.0;
  for (double v : u) acc += std::pow(std::abs(v), p);
  return std::pow(acc / n, 1.0 / p);
}

std::vector<double> to_physical(const SpectralField& x, std::size_t n_grid) {
  check_grid(x.cutoff(), n_grid);
  auto& fft = detail::RealFft::for_size(n_grid);
  auto* spec = fft.spectrum();
  std::fill_n(spec, n_grid / 2 + 1, std::complex<double>{});
  std::copy(x.coeffs().begin(), x.coeffs().end(), spec + 1);
  fft.backward();
  return {fft.samples(), fft.samples() + n_grid};
}

SpectralField from_physical(std::span<const double> samples, std::size_t m) {
  const std::size_t n = samples.size();
  check_grid(m, n);
  auto& fft = detail::RealFft::for_size(n);
  std::copy(samples.begin(), samples.end(), fft.samples());
  fft.forward();
  SpectralField out(m);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= m; ++k) out.set_mode(k, fft.spectrum()[k] * inv_n);
  return out;
}

}  // namespace sgl
