// SPDX-License-Identifier: Apache-2.0
//
// Trajectory statistics: occupation averages, irreducibility probes,
// two-ensemble exponential-rate fits, the moderate-deviation functional
// M_t = (1 / (b(t) sqrt t)) int_0^t (f(X_s) - pi(f)) ds and batch-means
// asymptotic variance.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgl/gl_dynamics.hpp"
#include "sgl/spectral.hpp"

namespace sgl {

struct Observable {
  std::string name;
  std::function<double(const SpectralField&)> eval;
  // c with |f| <= c Psi, when known
  std::optional<double> envelope;

  double operator()(const SpectralField& x) const { return eval(x); }
};

// min(||x||_H^2, clip)
Observable energy_observable(double clip);
Observable constant_observable(double c);

// Left-point quadrature (1 / t_end) sum f(X_{t_i}) (t_{i+1} - t_i); a single
// snapshot gives f(X_0).
double occupation_average(const Trajectory& traj, const Observable& f);

struct ProbeResult {
  std::size_t hits = 0;
  std::size_t n_paths = 0;
  double frequency = 0.0;
  // two-sided 95% Clopper-Pearson lower limit
  double cp_lower = 0.0;
  // ||X_T - a||_H per path, path order
  std::vector<double> distances;
};

double clopper_pearson_lower(std::size_t hits, std::size_t n, double confidence = 0.95);

// Fraction of distances strictly below eps.
double hit_frequency(std::span<const double> distances, double eps);

// Runs n_paths trajectories of cfg (T overridden) from x0 with streams
// (seed, i) and counts ||X_T - a||_H < eps.
ProbeResult irreducibility_probe(const SpectralField& x0, const SpectralField& a, double eps,
                                 double T, std::size_t n_paths, const SimConfig& cfg,
                                 std::uint64_t seed, unsigned threads = 1);

struct EnsembleStats {
  std::string observable;
  std::string tag;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> median_of_means;
  std::size_t n_members = 0;
};

// Observable evaluated on every recorded snapshot of n_members trajectories
// from cfg (streams (seed, i)).
EnsembleStats ensemble_stats(const SimConfig& cfg, const Observable& f, std::size_t n_members,
                             std::uint64_t seed, std::string tag, unsigned threads = 1);

struct RateFit {
  bool ok = false;
  std::string reason;
  double rho_hat = 0.0;    // per unit time
  double theta_hat = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
  double floor = 0.0;
};

// Log-linear fit of |mean_x(t) - mean_y(t)| <= theta (psi_x + psi_y) rho^t
// over the decaying prefix of the grid: points up to the first gap at or
// below max(3 median(gap over the final half), 1e-13 max gap).
RateFit rate_fit(const EnsembleStats& x, const EnsembleStats& y, double psi_x, double psi_y);

// b(t) = t^kappa, kappa in (0, 1/2).
double mdp_functional(const Trajectory& traj, const Observable& f, double kappa,
                      double pi_f_hat);
// Same with an explicit scale b > 0.
double mdp_functional_scaled(const Trajectory& traj, const Observable& f, double b,
                             double pi_f_hat);
// From left-point values f(X_0), ..., f(X_{n-1}) on a grid of spacing h
// (t = n h).
double mdp_functional(std::span<const double> series, double h, double kappa,
                      double pi_f_hat);

// Left-point values f(X_{t_0}), ..., f(X_{t_{n-1}}) on a uniform grid.
std::vector<double> observable_series(const Trajectory& traj, const Observable& f);

// Batch means on a uniform series with spacing h: L h var(batch means).
// Requires n_batches >= 10 and at least 50 values per batch.
double sigma2_batch_means(std::span<const double> series, double h, std::size_t n_batches);
double sigma2_batch_means(const Trajectory& traj, const Observable& f, std::size_t n_batches);

struct TailReport {
  bool degenerate = false;
  bool pass = false;
  double sigma = 0.0;
  double b = 0.0;
  std::vector<double> radii;
  std::vector<double> tail_freq;
  // -log P(|M| > r) / b^2
  std::vector<double> empirical_rate;
  // r^2 / (2 sigma^2)
  std::vector<double> gaussian_rate;
  std::vector<double> ratio;
};

// Compares tails at r in {0.5, 1, 1.5} sigma; pass when every ratio lies in
// [1/2, 2]. Needs at least 1000 samples.
TailReport mdp_tail_check(std::span<const double> samples, double sigma2, double b);

}  // namespace sgl
