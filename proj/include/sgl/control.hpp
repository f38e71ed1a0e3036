// SPDX-License-Identifier: Apache-2.0
//
// Approximate controllability of x' + Ax = N(x) + u: run free for [0, t0],
// then follow the straight line from x(t0) to the smoothed target
// e^{-theta_s A} a, with the control that makes the line an exact solution.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "sgl/gl_dynamics.hpp"
#include "sgl/spectral.hpp"

namespace sgl {

struct SmoothedTarget {
  double theta_s = 1.0;
  SpectralField a_smooth;
  // ||e^{-theta_s A} a - a||_V
  double error = 0.0;
};

// Largest theta_s in {1, 1/2, 1/4, ...} with ||e^{-theta_s A} a - a||_V <= eps/4.
SmoothedTarget smooth_target(const SpectralField& a, double eps);

// Noiseless solution with u = 0 at time t0 on cfg's grid (cfg.m, cfg.h,
// cfg.dealias; noise and T are ignored).
SpectralField free_flow(const SpectralField& x0, double t0, const SimConfig& cfg);

struct ControlPlan {
  double T = 0.0;
  double t0 = 0.0;
  double h = 0.0;
  double theta_s = 0.0;
  bool dealias = true;
  SpectralField x0;
  SpectralField a;
  SpectralField a_smooth;
  SpectralField x_t0;
  // u(t_n) for n = 0..steps on the grid t_n = n h; zero while t_n < t0.
  std::vector<SpectralField> controls;
  double sup_u_v = 0.0;

  std::size_t steps() const noexcept { return controls.empty() ? 0 : controls.size() - 1; }
  std::size_t switch_index() const;
  // Interpolation segment x(t) for t in [t0, T].
  SpectralField line_state(double t) const;
};

// Requires a band-limited target (a.cutoff() <= cfg.m, finite), eps > 0,
// T > 0 and t0 in (0, T); t0 <= 0 selects T / 2.
ControlPlan synthesize(const SpectralField& x0, const SpectralField& a, double T,
                       double eps, const SimConfig& cfg, double t0 = 0.0);

struct Reachability {
  // ||x_num(T) - a||_V
  double terminal_error = 0.0;
  // ||x_num(T) - a_smooth||_V, the integrator's share of the error
  double solver_error = 0.0;
  SpectralField x_T;
};

// Integrates x' + Ax = N(x) + u with u piecewise constant per step.
Reachability verify_reachability(const ControlPlan& plan);

// z' + Az = u, z(0) = 0, exponential Euler with the plan's controls.
std::vector<SpectralField> control_ou_path(const ControlPlan& plan);

inline constexpr std::array<double, 4> kGronwallExponents{4.0 / 3.0, 2.0, 8.0 / 3.0, 4.0};

struct GronwallGap {
  // ||Y_T - y(T)||_H^2
  double lhs = 0.0;
  // sum over the exponent set of int_0^T ||Z_s - z(s)||_V^i ds
  double rhs = 0.0;
};

// Y driven by z_path_stochastic and y driven by z_path_reference, both from
// cfg.x0 with cfg's grid. Both paths must have steps + 1 snapshots.
GronwallGap gronwall_gap(std::span<const SpectralField> z_path_stochastic,
                         std::span<const SpectralField> z_path_reference,
                         const SimConfig& cfg);

// Smallest C with lhs <= C * rhs over the sample (pairs with rhs == 0 must
// have lhs == 0).
double fit_gronwall_constant(std::span<const GronwallGap> sample);

// Pairs with lhs > slack * c * rhs.
std::size_t count_gronwall_violations(std::span<const GronwallGap> sample, double c,
                                      double slack = 1.1);

}  // namespace sgl
