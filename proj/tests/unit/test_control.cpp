// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "sgl/control.hpp"
#include "support/oracles.hpp"

using namespace sgl;
using doctest::Approx;

namespace {

SimConfig control_config(std::size_t m, double h, double T) {
  SimConfig c;
  c.m = m;
  c.h = h;
  c.T = T;
  c.noise = NoiseSpectrum(1.8, 0.8, m);
  c.x0 = SpectralField(m);
  return c;
}

}  // namespace

TEST_CASE("smoothed target") {
  const auto a = SpectralField::sine(16, 1, 0.3) + SpectralField::sine(16, 5, 0.02);
  CHECK_THROWS_AS(smooth_target(a, 0.0), DomainError);
  for (double eps : {0.5, 0.05, 0.005}) {
    CAPTURE(eps);
    const auto s = smooth_target(a, eps);
    CHECK(s.error <= eps / 4.0);
    CHECK(s.theta_s > 0.0);
    CHECK(std::log2(s.theta_s) == Approx(std::round(std::log2(s.theta_s))));
    // per-mode oracle for ||e^{-theta A} a - a||_V
    double sq = 0.0;
    for (std::size_t k = 1; k <= 16; ++k) {
      const double g = 4.0 * oracle::kPi * oracle::kPi * static_cast<double>(k * k);
      sq += 2.0 * g * std::norm(a.mode(k)) * std::pow(1.0 - std::exp(-g * s.theta_s), 2);
    }
    CHECK(s.error == Approx(std::sqrt(sq)).epsilon(1e-10));
    // the dyadic search stops at the first admissible theta
    if (s.theta_s < 1.0)
      CHECK(distance_frac(apply_semigroup(a, 2.0 * s.theta_s), a, 0.5) > eps / 4.0);
  }
  const auto zero = smooth_target(SpectralField(4), 0.1);
  CHECK(zero.theta_s == 1.0);
  CHECK(zero.error == 0.0);
}

TEST_CASE("synthesis preconditions") {
  const auto cfg = control_config(16, 1e-3, 1.0);
  const auto x0 = SpectralField::sine(16, 1, 0.5);
  const auto a = SpectralField::sine(16, 1, 0.3);
  CHECK_THROWS_AS(synthesize(x0, a, 0.0, 0.05, cfg), DomainError);
  CHECK_THROWS_AS(synthesize(x0, a, 1.0, 0.05, cfg, 1.0), DomainError);
  CHECK_THROWS_AS(synthesize(x0, SpectralField::sine(32, 1, 0.3), 1.0, 0.05, cfg), DomainError);
  CHECK_THROWS_AS(synthesize(x0, a, 1.0, -1.0, cfg), DomainError);
}

TEST_CASE("control plan structure") {
  const auto cfg = control_config(16, 1e-3, 1.0);
  const auto x0 = SpectralField::sine(16, 1, 0.5);
  const auto a = SpectralField::sine(16, 2, 0.3) + SpectralField::cosine(16, 1, 0.1);
  const auto plan = synthesize(x0, a, 1.0, 0.05, cfg);
  CHECK(plan.t0 == 0.5);
  CHECK(plan.steps() == 1000);
  CHECK(plan.switch_index() == 500);
  for (std::size_t n = 0; n < plan.switch_index(); ++n) CHECK(norm_h(plan.controls[n]) == 0.0);
  CHECK(norm_v(plan.controls[plan.switch_index()]) > 0.0);
  CHECK(norm_h(plan.line_state(plan.t0) - plan.x_t0) < 1e-15);
  CHECK(norm_h(plan.line_state(plan.T) - plan.a_smooth) < 1e-15);
  CHECK(norm_h(plan.x_t0 - free_flow(x0, 0.5, cfg)) == 0.0);
  double sup = 0.0;
  for (const auto& u : plan.controls) sup = std::max(sup, norm_v(u));
  CHECK(plan.sup_u_v == sup);

  // x' + A x - N(x) = u along the line, with a finite-difference x' and A applied per mode
  for (std::size_t n : {500u, 700u, 999u}) {
    const double t = static_cast<double>(n) * plan.h, dt = 1e-6;
    const auto x = plan.line_state(t);
    const auto dx = (1.0 / dt) * (plan.line_state(t + dt) - plan.line_state(t - dt));
    std::vector<std::complex<double>> ax(16);
    for (std::size_t k = 1; k <= 16; ++k) ax[k - 1] = x.mode(k) * eigenvalue(static_cast<long>(k));
    const auto resid = 0.5 * dx + SpectralField(ax) - nonlinearity(x) - plan.controls[n];
    CHECK(norm_v(resid) < 1e-6 * plan.sup_u_v);
  }
}

TEST_CASE("free flow") {
  const auto cfg = control_config(16, 1e-3, 1.0);
  CHECK_THROWS_AS(free_flow(SpectralField(16), 0.0, cfg), DomainError);
  CHECK(norm_h(free_flow(SpectralField(16), 0.3, cfg)) == 0.0);
  // the noise in cfg is ignored
  const auto x = free_flow(SpectralField::sine(16, 1, 0.5), 0.3, cfg);
  CHECK(norm_h(x) < 0.5 / std::sqrt(2.0) * std::exp(-(eigenvalue(1) - 1.0) * 0.3) * 1.01);
}

TEST_CASE("reachability and its convergence in h") {
  const auto x0 = SpectralField::sine(32, 1, 0.5);
  const auto a = SpectralField::sine(32, 1, 0.3);
  double prev = 0.0;
  for (double h : {4e-4, 2e-4, 1e-4}) {
    const auto plan = synthesize(x0, a, 1.0, 0.05, control_config(32, h, 1.0));
    const auto r = verify_reachability(plan);
    CAPTURE(h);
    CHECK(r.terminal_error <= 0.05);
    CHECK(r.terminal_error <= distance_frac(plan.a_smooth, a, 0.5) + r.solver_error + 1e-15);
    if (prev > 0.0) CHECK(r.solver_error / prev == Approx(0.5).epsilon(0.2));
    prev = r.solver_error;
  }
}

TEST_CASE("control OU path") {
  const auto plan = synthesize(SpectralField::sine(16, 1, 0.5), SpectralField::sine(16, 1, 0.3),
                               1.0, 0.05, control_config(16, 1e-3, 1.0));
  const auto z = control_ou_path(plan);
  REQUIRE(z.size() == plan.steps() + 1);
  for (std::size_t n = 0; n <= plan.switch_index(); ++n) CHECK(norm_h(z[n]) == 0.0);
  CHECK(norm_v(z.back()) > 0.0);
  // a driven run with this channel and no noise reproduces the controlled state
  auto cfg = control_config(16, 1e-3, 1.0);
  cfg.x0 = plan.x0;
  cfg.record_stride = cfg.steps();
  const auto x = simulate_driven(cfg, z).states.back();
  CHECK(distance_frac(x, verify_reachability(plan).x_T, 0.5) < 1e-8);
}

TEST_CASE("gronwall gap") {
  auto cfg = control_config(16, 1e-3, 0.2);
  cfg.x0 = SpectralField::sine(16, 1, 0.5);
  const std::vector<SpectralField> zero(cfg.steps() + 1, SpectralField(16));
  const auto same = gronwall_gap(zero, zero, cfg);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  CHECK_THROWS_AS(gronwall_gap(std::span(zero).first(10), zero, cfg), DomainError);

  NoiseStreams rng(3, 0, 16);
  const auto z = sample_ou_path(cfg.noise, cfg.h, cfg.steps(), rng);
  const auto gap = gronwall_gap(z, zero, cfg);
  CHECK(gap.lhs > 0.0);
  CHECK(gap.rhs > 0.0);
  // rhs oracle
  double rhs = 0.0;
  for (std::size_t n = 0; n < cfg.steps(); ++n) {
    const double d = std::sqrt(oracle::norm_sq_weighted(z[n], 0.5));
    rhs += cfg.h * (std::pow(d, 4.0 / 3.0) + d * d + std::pow(d, 8.0 / 3.0) + std::pow(d, 4));
  }
  CHECK(gap.rhs == Approx(rhs).epsilon(1e-10));
}

TEST_CASE("gronwall constant fit and violations") {
  const std::vector<GronwallGap> s{{1.0, 2.0}, {3.0, 2.0}, {0.0, 0.0}, {0.5, 5.0}};
  CHECK(fit_gronwall_constant(s) == 1.5);
  CHECK(count_gronwall_violations(s, 1.5) == 0);
  CHECK(count_gronwall_violations(s, 1.0) == 1);
  CHECK(count_gronwall_violations(s, 1.0, 1.6) == 0);
  const std::vector<GronwallGap> bad{{1.0, 0.0}};
  CHECK_THROWS_AS(fit_gronwall_constant(bad), DomainError);
  CHECK(fit_gronwall_constant(std::span<const GronwallGap>{}) == 0.0);
}
