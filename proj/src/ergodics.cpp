// SPDX-License-Identifier: Apache-2.0

#include "sgl/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "sgl/lyapunov.hpp"
#include "sgl/parallel.hpp"

namespace sgl {

Observable energy_observable(double clip) {
  if (!(clip > 0.0)) throw DomainError("energy_observable: clip must be > 0");
  // |f| <= clip <= clip Psi whenever M >= 1
  return {"energy_clip", [clip](const SpectralField& x) {
            const double e = norm_h(x);
            return std::min(e * e, clip);
          },
          clip};
}

Observable constant_observable(double c) {
  return {"constant", [c](const SpectralField&) { return c; }, std::abs(c)};
}

double occupation_average(const Trajectory& traj, const Observable& f) {
  if (traj.size() == 0) throw DomainError("occupation_average: empty trajectory");
  if (traj.size() == 1) return f(traj.states[0]);
  const double span = traj.times.back() - traj.times.front();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i)
    acc += f(traj.states[i]) * (traj.times[i + 1] - traj.times[i]);
  return acc / span;
}

double clopper_pearson_lower(std::size_t hits, std::size_t n, double confidence) {
  if (n == 0 || hits > n) throw DomainError("clopper_pearson_lower: need 0 <= hits <= n, n > 0");
  if (hits == 0) return 0.0;
  const double tail = (1.0 - confidence) / 2.0;
  return boost::math::ibeta_inv(static_cast<double>(hits), static_cast<double>(n - hits + 1),
                                tail);
}

double hit_frequency(std::span<const double> distances, double eps) {
  if (distances.empty()) return 0.0;
  const auto hits = std::count_if(distances.begin(), distances.end(),
                                  [eps](double d) { return d < eps; });
  return static_cast<double>(hits) / static_cast<double>(distances.size());
}

ProbeResult irreducibility_probe(const SpectralField& x0, const SpectralField& a, double eps,
                                 double T, std::size_t n_paths, const SimConfig& cfg,
                                 std::uint64_t seed, unsigned threads) {
  if (!(eps > 0.0)) throw DomainError("irreducibility_probe: eps must be > 0");
  if (n_paths == 0) throw DomainError("irreducibility_probe: n_paths must be >= 1");
  SimConfig run = cfg;
  run.T = T;
  run.x0 = with_cutoff(x0, cfg.m);
  run.validate();
  const SpectralField target = with_cutoff(a, cfg.m);

  ProbeResult out;
  out.n_paths = n_paths;
  out.distances.assign(n_paths, 0.0);
  const std::size_t steps = run.steps();
  parallel_for(n_paths, threads, [&](std::size_t i) {
    NoiseStreams rng(seed, i, run.m);
    SimulateOptions opts;
    opts.store_states = false;
    opts.observer = [&](std::size_t n, double, const SpectralField& x) {
      if (n == steps) out.distances[i] = distance_frac(x, target, 0.0);
    };
    simulate(run, rng, opts);
  });
  out.hits = static_cast<std::size_t>(std::count_if(
      out.distances.begin(), out.distances.end(), [eps](double d) { return d < eps; }));
  out.frequency = static_cast<double>(out.hits) / static_cast<double>(n_paths);
  out.cp_lower = clopper_pearson_lower(out.hits, n_paths);
  return out;
}

EnsembleStats ensemble_stats(const SimConfig& cfg, const Observable& f, std::size_t n_members,
                             std::uint64_t seed, std::string tag, unsigned threads) {
  if (n_members < 2) throw DomainError("ensemble_stats: need at least 2 members");
  cfg.validate();
  std::vector<double> times;
  for (std::size_t n = 0; n <= cfg.steps(); ++n)
    if (n % cfg.record_stride == 0 || n == cfg.steps())
      times.push_back(static_cast<double>(n) * cfg.h);

  std::vector<std::vector<double>> values(n_members, std::vector<double>(times.size()));
  parallel_for(n_members, threads, [&](std::size_t i) {
    NoiseStreams rng(seed, i, cfg.m);
    SimulateOptions opts;
    opts.store_states = false;
    std::size_t slot = 0;
    opts.observer = [&](std::size_t, double, const SpectralField& x) {
      values[i][slot++] = f(x);
    };
    simulate(cfg, rng, opts);
  });

  EnsembleStats out;
  out.observable = f.name;
  out.tag = std::move(tag);
  out.times = times;
  out.n_members = n_members;
  const std::size_t blocks = std::min<std::size_t>(10, n_members);
  std::vector<double> column(n_members);
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t i = 0; i < n_members; ++i) column[i] = values[i][j];
    out.mean.push_back(std::accumulate(column.begin(), column.end(), 0.0) /
                       static_cast<double>(n_members));
    out.median_of_means.push_back(median_of_means(column, blocks).estimate);
  }
  return out;
}

RateFit rate_fit(const EnsembleStats& x, const EnsembleStats& y, double psi_x, double psi_y) {
  if (x.times != y.times || x.mean.size() != x.times.size() || y.mean.size() != y.times.size())
    throw DomainError("rate_fit: ensembles are not on a common grid");
  RateFit fit;
  const std::size_t n = x.times.size();
  std::vector<double> gap(n);
  for (std::size_t j = 0; j < n; ++j) gap[j] = std::abs(x.mean[j] - y.mean[j]);
  const double max_gap = n ? *std::max_element(gap.begin(), gap.end()) : 0.0;
  if (!(max_gap > 0.0)) {
    fit.reason = "gap identically zero";
    return fit;
  }
  std::vector<double> tail(gap.begin() + static_cast<std::ptrdiff_t>(n / 2), gap.end());
  std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2),
                   tail.end());
  const double median_tail = tail[tail.size() / 2];
  fit.floor = std::max(3.0 * median_tail, 1e-13 * max_gap);

  std::size_t len = 0;
  while (len < n && gap[len] > fit.floor) ++len;
  fit.n_points = len;
  if (len < 3) {
    fit.reason = "fewer than 3 points above the noise floor";
    return fit;
  }
  double st = 0.0, sl = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    st += x.times[j];
    sl += std::log(gap[j]);
  }
  const double mt = st / static_cast<double>(len);
  const double ml = sl / static_cast<double>(len);
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    const double dt = x.times[j] - mt;
    const double dl = std::log(gap[j]) - ml;
    stt += dt * dt;
    stl += dt * dl;
    sll += dl * dl;
  }
  const double slope = stl / stt;
  const double intercept = ml - slope * mt;
  fit.r2 = sll > 0.0 ? stl * stl / (stt * sll) : 1.0;
  fit.rho_hat = std::exp(slope);
  fit.theta_hat = std::exp(intercept) / (psi_x + psi_y);
  if (!(slope < 0.0)) {
    fit.reason = "gap is not decaying";
    return fit;
  }
  fit.ok = true;
  return fit;
}

double mdp_functional_scaled(const Trajectory& traj, const Observable& f, double b,
                             double pi_f_hat) {
  if (!(b > 0.0)) throw DomainError("mdp_functional: b must be > 0");
  if (traj.size() < 2) throw DomainError("mdp_functional: need at least two snapshots");
  const double t = traj.times.back() - traj.times.front();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i)
    acc += (f(traj.states[i]) - pi_f_hat) * (traj.times[i + 1] - traj.times[i]);
  return acc / (b * std::sqrt(t));
}

double mdp_functional(const Trajectory& traj, const Observable& f, double kappa,
                      double pi_f_hat) {
  if (!(kappa > 0.0 && kappa < 0.5))
    throw DomainError("mdp_functional: kappa must lie in (0, 1/2)");
  if (traj.size() < 2) throw DomainError("mdp_functional: need at least two snapshots");
  const double t = traj.times.back() - traj.times.front();
  return mdp_functional_scaled(traj, f, std::pow(t, kappa), pi_f_hat);
}

double mdp_functional(std::span<const double> series, double h, double kappa,
                      double pi_f_hat) {
  if (!(kappa > 0.0 && kappa < 0.5))
    throw DomainError("mdp_functional: kappa must lie in (0, 1/2)");
  if (series.empty() || !(h > 0.0)) throw DomainError("mdp_functional: empty series");
  const double t = static_cast<double>(series.size()) * h;
  double acc = 0.0;
  for (double v : series) acc += (v - pi_f_hat) * h;
  return acc / (std::pow(t, kappa) * std::sqrt(t));
}

std::vector<double> observable_series(const Trajectory& traj, const Observable& f) {
  std::vector<double> out;
  if (traj.size() < 2) return out;
  out.reserve(traj.size() - 1);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) out.push_back(f(traj.states[i]));
  return out;
}

double sigma2_batch_means(std::span<const double> series, double h, std::size_t n_batches) {
  if (n_batches < 10) throw DomainError("sigma2_batch_means: need at least 10 batches");
  if (!(h > 0.0)) throw DomainError("sigma2_batch_means: h must be > 0");
  const std::size_t len = series.size() / n_batches;
  if (len < 50) throw DomainError("sigma2_batch_means: trajectory too short (< 50 steps per batch)");
  std::vector<double> means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(b * len);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) /
               static_cast<double>(len);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) /
                       static_cast<double>(n_batches);
  double ss = 0.0;
  for (double v : means) ss += (v - grand) * (v - grand);
  return static_cast<double>(len) * h * ss / static_cast<double>(n_batches - 1);
}

double sigma2_batch_means(const Trajectory& traj, const Observable& f, std::size_t n_batches) {
  if (traj.size() < 2) throw DomainError("sigma2_batch_means: trajectory too short");
  const double h = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i + 1 < traj.size(); ++i)
    if (std::abs(traj.times[i + 1] - traj.times[i] - h) > 1e-9 * h)
      throw DomainError("sigma2_batch_means: trajectory grid is not uniform");
  const auto series = observable_series(traj, f);
  return sigma2_batch_means(series, h, n_batches);
}

TailReport mdp_tail_check(std::span<const double> samples, double sigma2, double b) {
  if (samples.size() < 1000) throw DomainError("mdp_tail_check: need at least 1000 samples");
  if (!(b > 0.0)) throw DomainError("mdp_tail_check: b must be > 0");
  TailReport rep;
  rep.b = b;
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  if (!(sigma2 > 0.0) || !(ss > 0.0)) {
    rep.degenerate = true;
    return rep;
  }
  rep.sigma = std::sqrt(sigma2);
  rep.pass = true;
  for (double c : {0.5, 1.0, 1.5}) {
    const double r = c * rep.sigma;
    const auto over = std::count_if(samples.begin(), samples.end(),
                                    [r](double v) { return std::abs(v) > r; });
    const double freq = static_cast<double>(over) / n;
    const double emp = over > 0 ? -std::log(freq) / (b * b)
                                : std::numeric_limits<double>::infinity();
    const double gauss = r * r / (2.0 * sigma2);
    const double ratio = emp / gauss;
    rep.radii.push_back(r);
    rep.tail_freq.push_back(freq);
    rep.empirical_rate.push_back(emp);
    rep.gaussian_rate.push_back(gauss);
    rep.ratio.push_back(ratio);
    if (!(ratio >= 0.5 && ratio <= 2.0)) rep.pass = false;
  }
  return rep;
}

}  // namespace sgl
