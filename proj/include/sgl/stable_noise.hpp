// SPDX-License-Identifier: Apache-2.0
//
// Symmetric alpha-stable driving noise L_t = sum_k beta_k l_k(t) e_k and the
// exactly sampled Ornstein-Uhlenbeck convolution dZ + AZ dt = dL, Z_0 = 0.
//
// Normalization: l(1) has characteristic function exp(-|theta|^alpha); the
// Levy measure then has density c_alpha |y|^{-1-alpha} with
// c_alpha = Gamma(1 + alpha) sin(pi alpha / 2) / pi.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sgl/spectral.hpp"

namespace sgl {

double levy_norm(double alpha);

class NoiseSpectrum {
 public:
  // beta_k = gamma_k^{-beta}, k = 1..m. Requires alpha in (1, 2) and
  // beta > 1/2 + 1/(2 alpha); throws DomainError otherwise.
  NoiseSpectrum(double alpha, double beta, std::size_t m);

  // Same alpha/beta bookkeeping with every amplitude zero (noise off).
  static NoiseSpectrum silent(double alpha, double beta, std::size_t m);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  std::size_t cutoff() const noexcept { return amps_.size(); }
  double levy_norm() const noexcept { return levy_norm_; }
  bool is_silent() const noexcept { return silent_; }

  double amplitude(std::size_t k) const { return amps_.at(k - 1); }
  std::span<const double> amplitudes() const noexcept { return amps_; }

  // Lower admissibility bound 1/2 + 1/(2 alpha).
  static double min_beta(double alpha) { return 0.5 + 0.5 / alpha; }

 private:
  NoiseSpectrum() = default;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double levy_norm_ = 0.0;
  bool silent_ = false;
  std::vector<double> amps_;
};

// c_alpha |y|^{-1-alpha}; throws DomainError for y == 0.
double levy_density(double y, const NoiseSpectrum& spec);

// One independent, reproducible random stream per (seed, trajectory, mode).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t mode);

  // Uniform on the open interval (0, 1).
  double uniform_open();
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Symmetric alpha-stable draw with CF exp(-|theta|^alpha), alpha in (1, 2]
// (Chambers-Mallows-Stuck).
double sample_standard_stable(double alpha, RngStream& rng);

// Per-mode streams of one trajectory. Mode k's stream does not depend on the
// cutoff, so runs at different cutoffs share their low-mode noise.
class NoiseStreams {
 public:
  NoiseStreams(std::uint64_t seed, std::uint64_t trajectory, std::size_t m);
  RngStream& mode(std::size_t k) { return streams_.at(k - 1); }
  std::size_t cutoff() const noexcept { return streams_.size(); }

 private:
  std::vector<RngStream> streams_;
};

// Scale of int_0^h exp(-gamma (h - s)) dl(s): ((1 - e^{-alpha gamma h}) / (alpha gamma))^{1/alpha}.
double ou_increment_scale(double gamma, double h, double alpha);

// Precomputed per-mode decay and noise gain for a fixed step h.
class OuStepper {
 public:
  OuStepper(const NoiseSpectrum& spec, double h);

  // z_k <- e^{-gamma_k h} z_k + beta_k s_k 2^{-1/alpha} (xi_re + i xi_im)
  void advance(SpectralField& z, NoiseStreams& rng) const;

  double step() const noexcept { return h_; }
  const NoiseSpectrum& spectrum() const noexcept { return spec_; }

 private:
  NoiseSpectrum spec_;
  double h_;
  std::vector<double> decay_;
  std::vector<double> gain_;
};

SpectralField step_ou(const SpectralField& z, double h, const NoiseSpectrum& spec,
                      NoiseStreams& rng);

// Z snapshots z(0), z(h), ..., one trajectory.
using ZPath = std::vector<SpectralField>;

// Exact OU path with Z_0 = 0 on {0, h, ..., steps h}.
ZPath sample_ou_path(const NoiseSpectrum& spec, double h, std::size_t steps,
                     NoiseStreams& rng);

// Monte Carlo estimate of E sup_t ||A^theta Z_t||_H^p over snapshot times.
// Requires 0 <= theta < beta - 1/(2 alpha) and 0 < p < alpha.
double maximal_statistic(std::span<const ZPath> paths, double theta, double p,
                         const NoiseSpectrum& spec);

// Same statistic for every horizon in `horizons` from one set of streamed
// paths of length max(horizons); no path is stored.
std::vector<double> maximal_statistic_curve(const NoiseSpectrum& spec, double h,
                                            std::span<const double> horizons,
                                            double theta, double p,
                                            std::size_t n_paths, std::uint64_t seed,
                                            unsigned threads = 1);

using FieldPath = std::function<SpectralField(double t)>;

// Per-path score int_0^T ||Z_t - phi_t||_V^p dt + ||Z_T - a||_V (left-point
// step quadrature on snapshots).
std::vector<double> tube_scores(const FieldPath& phi, const SpectralField& a,
                                double p, double h, std::span<const ZPath> paths);

// Fraction of scores strictly below eps.
double frequency_below(std::span<const double> scores, double eps);

double tube_probability(const FieldPath& phi, const SpectralField& a, double eps,
                        double T, double p, std::size_t n_paths,
                        const NoiseSpectrum& spec, double h, std::uint64_t seed);

}  // namespace sgl
