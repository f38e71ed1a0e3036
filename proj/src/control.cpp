// SPDX-License-Identifier: Apache-2.0

#include "sgl/control.hpp"

#include <algorithm>
#include <cmath>

namespace sgl {

SmoothedTarget smooth_target(const SpectralField& a, double eps) {
  if (!(eps > 0.0)) throw DomainError("smooth_target: eps must be > 0");
  if (!a.all_finite() || !std::isfinite(norm_v(a)))
    throw DomainError("smooth_target: target not in V");
  const double budget = eps / 4.0;
  double theta = 1.0;
  for (int i = 0; i < 1024; ++i, theta *= 0.5) {
    SpectralField smooth = apply_semigroup(a, theta);
    const double err = distance_frac(smooth, a, 0.5);
    if (err <= budget) return {theta, std::move(smooth), err};
  }
  return {0.0, a, 0.0};
}

SpectralField free_flow(const SpectralField& x0, double t0, const SimConfig& cfg) {
  if (!(t0 > 0.0)) throw DomainError("free_flow: t0 must be > 0");
  SimConfig run = cfg;
  run.T = t0;
  run.x0 = x0;
  run.noise = NoiseSpectrum::silent(cfg.noise.alpha(), cfg.noise.beta(), cfg.m);
  run.record_stride = run.steps();
  NoiseStreams unused(0, 0, 0);
  return simulate(run, unused).states.back();
}

std::size_t ControlPlan::switch_index() const {
  return static_cast<std::size_t>(std::llround(t0 / h));
}

SpectralField ControlPlan::line_state(double t) const {
  const double span = T - t0;
  return ((t - t0) / span) * a_smooth + ((T - t) / span) * x_t0;
}

ControlPlan synthesize(const SpectralField& x0, const SpectralField& a, double T,
                       double eps, const SimConfig& cfg, double t0) {
  if (!(T > 0.0)) throw DomainError("synthesize: T must be > 0");
  if (t0 <= 0.0) t0 = T / 2.0;
  if (!(t0 < T)) throw DomainError("synthesize: t0 must lie in (0, T)");
  if (a.cutoff() > cfg.m || !a.all_finite())
    throw DomainError("synthesize: target must be band-limited to the cutoff (in V)");

  ControlPlan plan;
  plan.T = T;
  plan.t0 = t0;
  plan.h = cfg.h;
  plan.dealias = cfg.dealias;
  plan.x0 = with_cutoff(x0, cfg.m);
  plan.a = with_cutoff(a, cfg.m);
  const SmoothedTarget target = smooth_target(plan.a, eps);
  plan.theta_s = target.theta_s;
  plan.a_smooth = target.a_smooth;
  plan.x_t0 = free_flow(plan.x0, t0, cfg);

  const auto steps = static_cast<std::size_t>(std::llround(T / cfg.h));
  const std::size_t n0 = plan.switch_index();
  // slope of the line; u = slope + A x(t) - N(x(t)) makes x' + Ax = N(x) + u exact
  const SpectralField slope = (1.0 / (T - t0)) * (plan.a_smooth - plan.x_t0);
  plan.controls.assign(steps + 1, SpectralField(cfg.m));
  for (std::size_t n = n0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * cfg.h;
    const SpectralField x = plan.line_state(t);
    SpectralField u = slope + apply_fractional_power(x, 1.0);
    u -= nonlinearity(x, cfg.dealias);
    plan.controls[n] = std::move(u);
  }
  for (const auto& u : plan.controls) plan.sup_u_v = std::max(plan.sup_u_v, norm_v(u));
  return plan;
}

Reachability verify_reachability(const ControlPlan& plan) {
  const std::size_t m = plan.x0.cutoff();
  const ExpEulerStepper stepper(m, plan.h);
  SpectralField x = plan.x0;
  SpectralField g(m);
  for (std::size_t n = 0; n < plan.steps(); ++n) {
    nonlinearity_into(x, g, plan.dealias);
    g += plan.controls[n];
    stepper.advance(x, g);
    const double norm = norm_h(x);
    if (!std::isfinite(norm) || norm > kOverflowGuard)
      throw NumericAbort("verify_reachability: state exceeds the overflow guard");
  }
  Reachability r;
  r.terminal_error = distance_frac(x, plan.a, 0.5);
  r.solver_error = distance_frac(x, plan.a_smooth, 0.5);
  r.x_T = std::move(x);
  return r;
}

std::vector<SpectralField> control_ou_path(const ControlPlan& plan) {
  const std::size_t m = plan.x0.cutoff();
  const ExpEulerStepper stepper(m, plan.h);
  std::vector<SpectralField> path;
  path.reserve(plan.steps() + 1);
  SpectralField z(m);
  path.push_back(z);
  for (std::size_t n = 0; n < plan.steps(); ++n) {
    stepper.advance(z, plan.controls[n]);
    path.push_back(z);
  }
  return path;
}

GronwallGap gronwall_gap(std::span<const SpectralField> z_path_stochastic,
                         std::span<const SpectralField> z_path_reference,
                         const SimConfig& cfg) {
  if (z_path_stochastic.size() != z_path_reference.size() ||
      z_path_stochastic.size() != cfg.steps() + 1)
    throw DomainError("gronwall_gap: noise channels are not on the configuration grid");
  SimConfig run = cfg;
  run.record_stride = run.steps();
  const auto big = simulate_driven(run, z_path_stochastic);
  const auto small = simulate_driven(run, z_path_reference);
  // Y_T = X_T - Z_T
  const SpectralField y_big = big.states.back() - z_path_stochastic.back();
  const SpectralField y_small = small.states.back() - z_path_reference.back();

  GronwallGap gap;
  const double dy = norm_h(y_big - y_small);
  gap.lhs = dy * dy;
  for (std::size_t n = 0; n + 1 < z_path_stochastic.size(); ++n) {
    const double d = distance_frac(z_path_stochastic[n], z_path_reference[n], 0.5);
    for (double e : kGronwallExponents) gap.rhs += std::pow(d, e) * cfg.h;
  }
  return gap;
}

double fit_gronwall_constant(std::span<const GronwallGap> sample) {
  double c = 0.0;
  for (const auto& g : sample) {
    if (g.rhs > 0.0) {
      c = std::max(c, g.lhs / g.rhs);
    } else if (g.lhs > 0.0) {
      throw DomainError("fit_gronwall_constant: positive gap with zero forcing difference");
    }
  }
  return c;
}

std::size_t count_gronwall_violations(std::span<const GronwallGap> sample, double c,
                                      double slack) {
  return static_cast<std::size_t>(std::count_if(
      sample.begin(), sample.end(),
      [&](const GronwallGap& g) { return g.lhs > slack * c * g.rhs; }));
}

}  // namespace sgl
