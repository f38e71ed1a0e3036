// SPDX-License-Identifier: Apache-2.0
//
// Lyapunov function Psi(x) = (M + ||x||_H^2)^{1/2} and the one-sided drift
// bound for -L Psi / Psi:
//
//   ||x||_V^2 / (M + ||x||_H^2) - 1 / (4 (M + ||x||_H^2))
//     - 2 c S2 / ((2 - alpha)(M + ||x||_H^2)) - 2 c S1 / ((alpha - 1) Psi)
//
// with S2 = sum beta_i^2, S1 = sum |beta_i| over the full lattice i != 0
// and c the Levy-measure normalization.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sgl/spectral.hpp"
#include "sgl/stable_noise.hpp"

namespace sgl {

// Throws DomainError for M <= 0.
double psi(const SpectralField& x, double M);

struct JumpSums {
  double sum_sq = 0.0;   // sum beta_i^2
  double sum_abs = 0.0;  // sum |beta_i|
};

// Full-lattice sums of gamma_{|i|}^{-2 beta} and gamma_{|i|}^{-beta},
// explicit up to |i| = terms (0 selects 10 m) plus an integral-test tail
// bound. Silent spectra give zero.
JumpSums jump_sums(const NoiseSpectrum& spec, std::size_t terms = 0);

struct DriftReport {
  double norm_h = 0.0;
  double norm_v = 0.0;
  double M = 0.0;
  double psi = 0.0;
  double alpha = 0.0;
  double c_norm = 0.0;
  JumpSums sums;
  double j1_exact = 0.0;  // -||x||_V^2 / Psi
  double j2_bound = 0.0;  // 1 / (4 Psi)
  double j3_bound = 0.0;  // 2 c S2 / ((2 - alpha) Psi)
  double j4_bound = 0.0;  // 2 c S1 / (alpha - 1)
  double drift_ratio_lower = 0.0;
  bool in_K = false;      // ||x||_V^2 <= M
};

// Assembles the bound from the stored norms and constants.
double drift_ratio_from(double norm_h, double norm_v, double M, double alpha, double c_norm,
                        const JumpSums& sums);

DriftReport generator_terms(const SpectralField& x, const NoiseSpectrum& spec, double M);

// Left side of the M-selection inequality:
// 1/(4M) + 2 c S2 / ((2 - alpha) M) + 2 c S1 / ((alpha - 1) sqrt(M)).
double m_selection_lhs(const NoiseSpectrum& spec, double M);

// Smallest M in {1, 2, 4, ...} with m_selection_lhs <= 1/4.
double choose_M(const NoiseSpectrum& spec);

struct DriftSummary {
  double M = 0.0;
  std::vector<DriftReport> reports;
  std::size_t n_K = 0;
  std::size_t n_Kc = 0;
  std::size_t n_violations_K = 0;   // ratio < -1/4 on K
  std::size_t n_violations_Kc = 0;  // ratio < 1/4 off K
  double min_ratio_Kc = std::numeric_limits<double>::infinity();
  double min_ratio_K = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> violations;
};

DriftSummary certify_drift(std::span<const SpectralField> states, const NoiseSpectrum& spec,
                           double M);

// Median-of-means over `blocks` equal blocks (trailing remainder dropped);
// std_error = sd(block means) / sqrt(blocks).
struct RobustMean {
  double estimate = 0.0;
  double std_error = 0.0;
};
RobustMean median_of_means(std::span<const double> values, std::size_t blocks = 10);

struct GeneratorCheck {
  // -drift_ratio_lower * Psi(x): upper bound on L Psi(x)
  double analytic_bound = 0.0;
  // (E Psi(X_h) - Psi(x)) / h
  double mc_estimate = 0.0;
  double std_error = 0.0;
};

// One step of the simulate integrator from x per path, streams (seed, i).
GeneratorCheck generator_mc_check(const SpectralField& x, const NoiseSpectrum& spec, double M,
                                  double h, std::size_t n_paths, std::uint64_t seed,
                                  bool dealias = true, unsigned threads = 1);

}  // namespace sgl
