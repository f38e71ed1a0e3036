// SPDX-License-Identifier: Apache-2.0

#include "sgl/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgl/gl_dynamics.hpp"
#include "sgl/parallel.hpp"

namespace sgl {

double psi(const SpectralField& x, double M) {
  if (!(M > 0.0)) throw DomainError("psi: M must be > 0");
  const double h = norm_h(x);
  return std::sqrt(M + h * h);
}

namespace {

// 2 * sum_{k>=1} (4 pi^2 k^2)^{-p}: explicit to k = K, then the tail
// int_{K+1/2}^inf (4 pi^2)^{-p} x^{-2p} dx, an upper bound for convex summands.
double lattice_sum(double p, std::size_t K) {
  const double s = 2.0 * p;
  double acc = 0.0;
  for (std::size_t k = K; k >= 1; --k) acc += std::pow(static_cast<double>(k), -s);
  const double edge = static_cast<double>(K) + 0.5;
  acc += std::pow(edge, 1.0 - s) / (s - 1.0);
  return 2.0 * std::pow(4.0 * kPi * kPi, -p) * acc;
}

}  // namespace

JumpSums jump_sums(const NoiseSpectrum& spec, std::size_t terms) {
  if (spec.is_silent()) return {};
  if (terms == 0) terms = 10 * spec.cutoff();
  return {lattice_sum(2.0 * spec.beta(), terms), lattice_sum(spec.beta(), terms)};
}

double drift_ratio_from(double norm_h, double norm_v, double M, double alpha, double c_norm,
                        const JumpSums& sums) {
  const double q = M + norm_h * norm_h;
  return norm_v * norm_v / q - 0.25 / q -
         2.0 * c_norm * sums.sum_sq / ((2.0 - alpha) * q) -
         2.0 * c_norm * sums.sum_abs / ((alpha - 1.0) * std::sqrt(q));
}

DriftReport generator_terms(const SpectralField& x, const NoiseSpectrum& spec, double M) {
  DriftReport r;
  r.M = M;
  r.psi = psi(x, M);
  r.norm_h = norm_h(x);
  r.norm_v = norm_v(x);
  r.alpha = spec.alpha();
  r.c_norm = spec.levy_norm();
  r.sums = jump_sums(spec);
  r.j1_exact = -r.norm_v * r.norm_v / r.psi;
  r.j2_bound = 0.25 / r.psi;
  r.j3_bound = 2.0 * r.c_norm * r.sums.sum_sq / ((2.0 - r.alpha) * r.psi);
  r.j4_bound = 2.0 * r.c_norm * r.sums.sum_abs / (r.alpha - 1.0);
  r.drift_ratio_lower = drift_ratio_from(r.norm_h, r.norm_v, M, r.alpha, r.c_norm, r.sums);
  r.in_K = r.norm_v * r.norm_v <= M;
  return r;
}

double m_selection_lhs(const NoiseSpectrum& spec, double M) {
  const JumpSums s = jump_sums(spec);
  const double c = spec.levy_norm();
  const double a = spec.alpha();
  return 0.25 / M + 2.0 * c * s.sum_sq / ((2.0 - a) * M) +
         2.0 * c * s.sum_abs / ((a - 1.0) * std::sqrt(M));
}

double choose_M(const NoiseSpectrum& spec) {
  double M = 1.0;
  while (m_selection_lhs(spec, M) > 0.25) M *= 2.0;
  return M;
}

DriftSummary certify_drift(std::span<const SpectralField> states, const NoiseSpectrum& spec,
                           double M) {
  DriftSummary out;
  out.M = M;
  out.reports.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    DriftReport r = generator_terms(states[i], spec, M);
    if (r.in_K) {
      ++out.n_K;
      out.min_ratio_K = std::min(out.min_ratio_K, r.drift_ratio_lower);
      if (r.drift_ratio_lower < -0.25) {
        ++out.n_violations_K;
        out.violations.push_back(i);
      }
    } else {
      ++out.n_Kc;
      out.min_ratio_Kc = std::min(out.min_ratio_Kc, r.drift_ratio_lower);
      if (r.drift_ratio_lower < 0.25) {
        ++out.n_violations_Kc;
        out.violations.push_back(i);
      }
    }
    out.reports.push_back(std::move(r));
  }
  return out;
}

RobustMean median_of_means(std::span<const double> values, std::size_t blocks) {
  if (blocks == 0 || values.size() < blocks)
    throw DomainError("median_of_means: need at least one value per block");
  const std::size_t len = values.size() / blocks;
  std::vector<double> means(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(b * len);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) /
               static_cast<double>(len);
  }
  const double avg = std::accumulate(means.begin(), means.end(), 0.0) /
                     static_cast<double>(blocks);
  double ss = 0.0;
  for (double v : means) ss += (v - avg) * (v - avg);
  const double sd = blocks > 1 ? std::sqrt(ss / static_cast<double>(blocks - 1)) : 0.0;

  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const double med = blocks % 2 == 1
                         ? sorted[blocks / 2]
                         : 0.5 * (sorted[blocks / 2 - 1] + sorted[blocks / 2]);
  return {med, sd / std::sqrt(static_cast<double>(blocks))};
}

GeneratorCheck generator_mc_check(const SpectralField& x, const NoiseSpectrum& spec, double M,
                                  double h, std::size_t n_paths, std::uint64_t seed,
                                  bool dealias, unsigned threads) {
  if (!(h > 0.0)) throw DomainError("generator_mc_check: h must be > 0");
  if (n_paths < 10) throw DomainError("generator_mc_check: need at least 10 paths");
  const std::size_t m = spec.cutoff();
  if (x.cutoff() > m) throw DomainError("generator_mc_check: x exceeds the noise cutoff");
  const SpectralField x0 = with_cutoff(x, m);
  const double psi0 = psi(x0, M);

  // The drift part of the step is shared by all paths.
  SpectralField y = x0;
  ExpEulerStepper(m, h).advance(y, nonlinearity(x0, dealias));
  const OuStepper ou(spec, h);

  std::vector<double> samples(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    NoiseStreams rng(seed, i, m);
    SpectralField z(m);
    ou.advance(z, rng);
    z += y;
    samples[i] = (psi(z, M) - psi0) / h;
  });

  const RobustMean mom = median_of_means(samples, 10);
  GeneratorCheck out;
  out.analytic_bound = -generator_terms(x0, spec, M).drift_ratio_lower * psi0;
  out.mc_estimate = mom.estimate;
  out.std_error = mom.std_error;
  return out;
}

}  // namespace sgl
