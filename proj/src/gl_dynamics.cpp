// SPDX-License-Identifier: Apache-2.0

#include "sgl/gl_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "sgl/kernels.hpp"

namespace sgl {

void SimConfig::validate() const {
  if (m == 0) throw DomainError("config: m must be >= 1");
  if (!(h > 0.0)) throw DomainError("config: h must be > 0");
  if (!(T >= h)) throw DomainError("config: T must be >= h");
  if (x0.cutoff() > m) throw DomainError("config: x0 cutoff exceeds m");
  if (!x0.all_finite()) throw DomainError("config: x0 has non-finite coefficients");
  if (noise.cutoff() != m) throw DomainError("config: noise cutoff must equal m");
  if (record_stride == 0) throw DomainError("config: record_stride must be >= 1");
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(T / h));
}

SpectralField SimConfig::initial_state() const { return with_cutoff(x0, m); }

void nonlinearity_into(const SpectralField& u, SpectralField& out, bool dealias) {
  const std::size_t m = u.cutoff();
  const std::size_t n = 4 * m;
  const std::size_t keep = dealias ? (2 * m) / 3 : m;
  auto& fft = detail::RealFft::for_size(n);
  auto* spec = fft.spectrum();
  std::fill_n(spec, n / 2 + 1, std::complex<double>{});
  std::copy_n(u.coeffs().begin(), keep, spec + 1);
  fft.backward();
  kernels::active().cubic_residual(fft.samples(), n);
  fft.forward();
  const double inv_n = 1.0 / static_cast<double>(n);
  auto dst = out.coeffs();
  for (std::size_t k = 1; k <= m; ++k) dst[k - 1] = spec[k] * inv_n;
}

SpectralField nonlinearity(const SpectralField& u, bool dealias) {
  SpectralField out(u.cutoff());
  nonlinearity_into(u, out, dealias);
  return out;
}

ExpEulerStepper::ExpEulerStepper(std::size_t m, double h)
    : h_(h), decay_(m), phi1_(m) {
  if (!(h > 0.0)) throw DomainError("exponential Euler: h must be > 0");
  const auto gamma = eigenvalues(m);
  for (std::size_t i = 0; i < m; ++i) {
    decay_[i] = std::exp(-gamma[i] * h);
    phi1_[i] = -std::expm1(-gamma[i] * h) / gamma[i];
  }
}

void ExpEulerStepper::advance(SpectralField& y, const SpectralField& g) const {
  if (y.cutoff() != decay_.size() || g.cutoff() != decay_.size())
    throw DomainError("exponential Euler: cutoff mismatch");
  kernels::active().affine_modes(y.raw(), decay_.data(), phi1_.data(), g.raw(),
                                 decay_.size());
}

SpectralField step(const SpectralField& y, const SpectralField& z, double h,
                   const SimConfig& cfg) {
  return step(y, z, h, [&cfg](const SpectralField& x) {
    return nonlinearity(x, cfg.dealias);
  });
}

SpectralField step(const SpectralField& y, const SpectralField& z, double h,
                   const Forcing& rhs) {
  if (y.cutoff() != z.cutoff()) throw DomainError("step: Y and Z cutoffs differ");
  SpectralField out = y;
  ExpEulerStepper(y.cutoff(), h).advance(out, rhs(y + z));
  return out;
}

namespace {

using ZAdvance = std::function<void(std::size_t, SpectralField&)>;

void guard(const SpectralField& x, std::size_t n, double h) {
  const double norm = norm_h(x);
  if (!std::isfinite(norm) || norm > kOverflowGuard)
    throw NumericAbort("simulate: ||X||_H = " + std::to_string(norm) + " at t = " +
                       std::to_string(static_cast<double>(n) * h) +
                       " exceeds the overflow guard; rerun with a smaller h");
}

void sum_into(const SpectralField& a, const SpectralField& b, SpectralField& out) {
  auto o = out.coeffs();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.coeffs()[i] + b.coeffs()[i];
}

Trajectory run(const SimConfig& cfg, const ZAdvance& advance_z, const SimulateOptions& opts) {
  cfg.validate();
  const std::size_t m = cfg.m;
  const std::size_t steps = cfg.steps();
  const ExpEulerStepper ys(m, cfg.h);

  SpectralField y = cfg.initial_state();
  SpectralField z(m);
  advance_z(0, z);
  SpectralField x(m);
  SpectralField g(m);
  sum_into(y, z, x);

  Trajectory traj;
  auto record = [&](std::size_t n) {
    const double t = static_cast<double>(n) * cfg.h;
    if (opts.observer) opts.observer(n, t, x);
    if (!opts.store_states) return;
    traj.times.push_back(t);
    traj.states.push_back(x);
    if (opts.keep_channels) {
      traj.y.push_back(y);
      traj.z.push_back(z);
    }
  };

  guard(x, 0, cfg.h);
  record(0);
  for (std::size_t n = 0; n < steps; ++n) {
    nonlinearity_into(x, g, cfg.dealias);
    ys.advance(y, g);
    advance_z(n + 1, z);
    sum_into(y, z, x);
    guard(x, n + 1, cfg.h);
    if ((n + 1) % cfg.record_stride == 0 || n + 1 == steps) record(n + 1);
  }
  return traj;
}

}  // namespace

Trajectory simulate(const SimConfig& cfg, NoiseStreams& rng, const SimulateOptions& opts) {
  cfg.validate();
  const OuStepper zs(cfg.noise, cfg.h);
  return run(
      cfg,
      [&](std::size_t n, SpectralField& z) {
        if (n > 0) zs.advance(z, rng);
      },
      opts);
}

Trajectory simulate_driven(const SimConfig& cfg, std::span<const SpectralField> z_path,
                           const SimulateOptions& opts) {
  cfg.validate();
  if (z_path.size() != cfg.steps() + 1)
    throw DomainError("simulate_driven: Z path length must be steps + 1");
  return run(
      cfg,
      [&](std::size_t n, SpectralField& z) {
        if (z_path[n].cutoff() != cfg.m)
          throw DomainError("simulate_driven: Z cutoff differs from m");
        z = z_path[n];
      },
      opts);
}

double mild_residual(const Trajectory& traj, const SimConfig& cfg) {
  if (!traj.has_channels()) throw DomainError("mild_residual: trajectory lacks Y/Z channels");
  if (cfg.record_stride != 1) throw DomainError("mild_residual: needs record_stride 1");
  const std::size_t m = cfg.m;
  const double h = cfg.h;
  const auto gamma = eigenvalues(m);

  // Exact integrals of e^{-gamma (h - s)} against (1 - s/h) and s/h.
  std::vector<double> decay(m), w_left(m), w_right(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = gamma[i] * h;
    const double e = std::exp(-x);
    const double phi1 = -std::expm1(-x) / gamma[i];
    // 1 - e - x e, series for small x to avoid cancellation
    const double q = x < 1e-3 ? x * x * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0)
                              : -std::expm1(-x) - x * e;
    const double phi2 = phi1 - q / (gamma[i] * gamma[i] * h);
    decay[i] = e;
    w_right[i] = phi2;
    w_left[i] = phi1 - phi2;
  }

  const SpectralField x0 = cfg.initial_state();
  SpectralField free = x0;   // e^{-A t_n} x0
  SpectralField integral(m); // I_n
  SpectralField n_prev = nonlinearity(traj.states[0], cfg.dealias);
  double worst = norm_h(traj.y[0] - x0);
  for (std::size_t n = 1; n < traj.size(); ++n) {
    const SpectralField n_next = nonlinearity(traj.states[n], cfg.dealias);
    auto ic = integral.coeffs();
    auto fc = free.coeffs();
    for (std::size_t i = 0; i < m; ++i) {
      ic[i] = decay[i] * ic[i] + w_left[i] * n_prev.coeffs()[i] +
              w_right[i] * n_next.coeffs()[i];
      fc[i] *= decay[i];
    }
    worst = std::max(worst, norm_h(traj.y[n] - free - integral));
    n_prev = n_next;
  }
  return worst;
}

}  // namespace sgl
