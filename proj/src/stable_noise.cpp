// SPDX-License-Identifier: Apache-2.0

#include "sgl/stable_noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgl/kernels.hpp"
#include "sgl/parallel.hpp"

namespace sgl {

double levy_norm(double alpha) {
  return std::tgamma(1.0 + alpha) * std::sin(kPi * alpha / 2.0) / kPi;
}

NoiseSpectrum::NoiseSpectrum(double alpha, double beta, std::size_t m)
    : alpha_(alpha), beta_(beta), levy_norm_(sgl::levy_norm(alpha)), amps_(m) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw DomainError("noise: alpha must lie in (1, 2), got " + std::to_string(alpha));
  if (!(beta > min_beta(alpha)))
    throw DomainError("noise: beta must exceed 1/2 + 1/(2 alpha) = " +
                      std::to_string(min_beta(alpha)));
  if (m == 0) throw DomainError("noise: cutoff must be >= 1");
  const auto gamma = eigenvalues(m);
  for (std::size_t i = 0; i < m; ++i) amps_[i] = std::pow(gamma[i], -beta);
}

NoiseSpectrum NoiseSpectrum::silent(double alpha, double beta, std::size_t m) {
  NoiseSpectrum s(alpha, beta, m);
  std::fill(s.amps_.begin(), s.amps_.end(), 0.0);
  s.silent_ = true;
  return s;
}

double levy_density(double y, const NoiseSpectrum& spec) {
  if (y == 0.0) throw DomainError("levy_density: y = 0 is a non-integrable singularity");
  return spec.levy_norm() * std::pow(std::abs(y), -1.0 - spec.alpha());
}

namespace {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t mode)
    : engine_(mix64(mix64(mix64(seed) + trajectory) + mode)) {}

double RngStream::uniform_open() {
  // 53 random bits mapped to (0, 1): (n + 0.5) / 2^53
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double sample_standard_stable(double alpha, RngStream& rng) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw DomainError("sample_standard_stable: alpha must lie in (1, 2]");
  const double u = kPi * (rng.uniform_open() - 0.5);
  const double w = -std::log(rng.uniform_open());
  const double cu = std::cos(u);
  return std::sin(alpha * u) / std::pow(cu, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

NoiseStreams::NoiseStreams(std::uint64_t seed, std::uint64_t trajectory, std::size_t m) {
  streams_.reserve(m);
  for (std::size_t k = 1; k <= m; ++k) streams_.emplace_back(seed, trajectory, k);
}

double ou_increment_scale(double gamma, double h, double alpha) {
  const double ag = alpha * gamma;
  return std::pow(-std::expm1(-ag * h) / ag, 1.0 / alpha);
}

OuStepper::OuStepper(const NoiseSpectrum& spec, double h)
    : spec_(spec), h_(h), decay_(spec.cutoff()), gain_(spec.cutoff()) {
  if (!(h > 0.0)) throw DomainError("OU step: h must be > 0");
  const auto gamma = eigenvalues(spec.cutoff());
  const double split = std::pow(2.0, -1.0 / spec.alpha());
  for (std::size_t i = 0; i < decay_.size(); ++i) {
    decay_[i] = std::exp(-gamma[i] * h);
    gain_[i] = spec.amplitudes()[i] * ou_increment_scale(gamma[i], h, spec.alpha()) * split;
  }
}

void OuStepper::advance(SpectralField& z, NoiseStreams& rng) const {
  const std::size_t m = spec_.cutoff();
  if (z.cutoff() != m) throw DomainError("OU step: field cutoff differs from noise cutoff");
  if (spec_.is_silent()) {
    kernels::active().scale_modes(z.raw(), decay_.data(), m);
    return;
  }
  thread_local std::vector<double> draws;
  draws.resize(2 * m);
  for (std::size_t k = 1; k <= m; ++k) {
    auto& s = rng.mode(k);
    draws[2 * (k - 1)] = sample_standard_stable(spec_.alpha(), s);
    draws[2 * (k - 1) + 1] = sample_standard_stable(spec_.alpha(), s);
  }
  kernels::active().affine_modes(z.raw(), decay_.data(), gain_.data(), draws.data(), m);
}

SpectralField step_ou(const SpectralField& z, double h, const NoiseSpectrum& spec,
                      NoiseStreams& rng) {
  SpectralField out = z;
  OuStepper(spec, h).advance(out, rng);
  return out;
}

ZPath sample_ou_path(const NoiseSpectrum& spec, double h, std::size_t steps,
                     NoiseStreams& rng) {
  const OuStepper stepper(spec, h);
  ZPath path;
  path.reserve(steps + 1);
  SpectralField z(spec.cutoff());
  path.push_back(z);
  for (std::size_t n = 0; n < steps; ++n) {
    stepper.advance(z, rng);
    path.push_back(z);
  }
  return path;
}

namespace {

void check_maximal_args(double theta, double p, const NoiseSpectrum& spec) {
  const double theta_max = spec.beta() - 0.5 / spec.alpha();
  if (!(theta >= 0.0 && theta < theta_max))
    throw DomainError("maximal_statistic: theta must lie in [0, beta - 1/(2 alpha)) = [0, " +
                      std::to_string(theta_max) + ")");
  if (!(p > 0.0 && p < spec.alpha()))
    throw DomainError("maximal_statistic: p must lie in (0, alpha)");
}

}  // namespace

double maximal_statistic(std::span<const ZPath> paths, double theta, double p,
                         const NoiseSpectrum& spec) {
  check_maximal_args(theta, p, spec);
  if (paths.empty()) throw DomainError("maximal_statistic: no paths");
  double acc = 0.0;
  for (const auto& path : paths) {
    double sup = 0.0;
    for (const auto& z : path) sup = std::max(sup, norm_frac(z, theta));
    acc += std::pow(sup, p);
  }
  return acc / static_cast<double>(paths.size());
}

std::vector<double> maximal_statistic_curve(const NoiseSpectrum& spec, double h,
                                            std::span<const double> horizons,
                                            double theta, double p,
                                            std::size_t n_paths, std::uint64_t seed,
                                            unsigned threads) {
  check_maximal_args(theta, p, spec);
  if (horizons.empty() || n_paths == 0)
    throw DomainError("maximal_statistic_curve: need horizons and paths");
  std::vector<std::size_t> marks;
  for (double T : horizons) {
    if (!(T > 0.0)) throw DomainError("maximal_statistic_curve: horizons must be > 0");
    marks.push_back(static_cast<std::size_t>(std::llround(T / h)));
  }
  const std::size_t steps = *std::max_element(marks.begin(), marks.end());
  const std::size_t m = spec.cutoff();
  std::vector<double> weights(m);
  const auto gamma = eigenvalues(m);
  for (std::size_t i = 0; i < m; ++i) weights[i] = std::pow(gamma[i], 2.0 * theta);

  // sups[path][horizon]
  std::vector<std::vector<double>> sups(n_paths, std::vector<double>(marks.size()));
  const OuStepper stepper(spec, h);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    NoiseStreams rng(seed, i, m);
    SpectralField z(m);
    double sup_sq = 0.0;
    for (std::size_t n = 1; n <= steps; ++n) {
      stepper.advance(z, rng);
      sup_sq = std::max(sup_sq, 2.0 * kernels::active().weighted_sum_sq(
                                          z.raw(), weights.data(), m));
      for (std::size_t j = 0; j < marks.size(); ++j)
        if (marks[j] == n) sups[i][j] = std::sqrt(sup_sq);
    }
  });
  std::vector<double> out(marks.size(), 0.0);
  for (const auto& row : sups)
    for (std::size_t j = 0; j < marks.size(); ++j) out[j] += std::pow(row[j], p);
  for (double& v : out) v /= static_cast<double>(n_paths);
  return out;
}

std::vector<double> tube_scores(const FieldPath& phi, const SpectralField& a, double p,
                                double h, std::span<const ZPath> paths) {
  std::vector<double> scores;
  scores.reserve(paths.size());
  for (const auto& path : paths) {
    if (path.empty()) throw DomainError("tube_scores: empty path");
    double integral = 0.0;
    for (std::size_t n = 0; n + 1 < path.size(); ++n) {
      const double t = static_cast<double>(n) * h;
      integral += std::pow(distance_frac(path[n], phi(t), 0.5), p) * h;
    }
    scores.push_back(integral + distance_frac(path.back(), a, 0.5));
  }
  return scores;
}

double frequency_below(std::span<const double> scores, double eps) {
  if (scores.empty()) return 0.0;
  const auto hits = std::count_if(scores.begin(), scores.end(),
                                  [eps](double s) { return s < eps; });
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double tube_probability(const FieldPath& phi, const SpectralField& a, double eps,
                        double T, double p, std::size_t n_paths,
                        const NoiseSpectrum& spec, double h, std::uint64_t seed) {
  if (!(eps > 0.0)) throw DomainError("tube_probability: eps must be > 0");
  if (n_paths == 0) throw DomainError("tube_probability: n_paths must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(T / h));
  std::vector<ZPath> paths;
  paths.reserve(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    NoiseStreams rng(seed, i, spec.cutoff());
    paths.push_back(sample_ou_path(spec, h, steps, rng));
  }
  const auto scores = tube_scores(phi, a, p, h, paths);
  return frequency_below(scores, eps);
}

}  // namespace sgl
