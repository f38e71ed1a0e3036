// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "sgl/gl_dynamics.hpp"
#include "support/oracles.hpp"

using namespace sgl;
using doctest::Approx;

namespace {

SimConfig config(std::size_t m, double h, double T, bool noisy, const SpectralField& x0) {
  SimConfig c;
  c.m = m;
  c.h = h;
  c.T = T;
  c.noise = noisy ? NoiseSpectrum(1.8, 0.8, m) : NoiseSpectrum::silent(1.8, 0.8, m);
  c.x0 = x0;
  return c;
}

Trajectory run(const SimConfig& c, std::uint64_t seed = 1, bool channels = false) {
  NoiseStreams rng(seed, 0, c.m);
  SimulateOptions o;
  o.keep_channels = channels;
  return simulate(c, rng, o);
}

}  // namespace

TEST_CASE("nonlinearity of a single sine") {
  // (a sin)^3 = a^3 (3 sin - sin 3) / 4
  const double a = 0.7;
  for (bool dealias : {false, true}) {
    const auto n = nonlinearity(SpectralField::sine(16, 1, a), dealias);
    const auto expect = SpectralField::sine(16, 1, a - 0.75 * a * a * a) +
                        SpectralField::sine(16, 3, 0.25 * a * a * a);
    CHECK(norm_h(n - expect) < 1e-14);
  }
  CHECK(norm_h(nonlinearity(SpectralField(8))) == 0.0);
}

TEST_CASE("nonlinearity matches a pointwise oracle") {
  std::mt19937_64 gen(3);
  // active modes <= m/3 so the cubic is resolved without truncation
  const auto u = oracle::random_field(24, 8, 4.0, gen);
  const auto n = nonlinearity(u, false);
  const std::size_t grid = 200;
  const auto us = oracle::samples(u, grid);
  const auto ns = oracle::samples(n, grid);
  // the field space has no mean mode, so the projection drops the mean of u^3
  double mean_cube = 0.0;
  for (double v : us) mean_cube += v * v * v / static_cast<double>(grid);
  for (std::size_t j = 0; j < grid; ++j)
    CHECK(ns[j] == Approx(us[j] - us[j] * us[j] * us[j] + mean_cube).epsilon(1e-10).scale(1.0));
}

TEST_CASE("dissipativity <N(u), u> = ||u||^2 - ||u||_4^4") {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 50; ++i) {
    const auto u = oracle::random_field(30, 10, 1.0 + i, gen);
    const double lhs = inner_h(nonlinearity(u, false), u);
    const double l4 = std::pow(norm_lp(u, 4.0), 4);
    CHECK(lhs == Approx(norm_h(u) * norm_h(u) - l4).epsilon(1e-10));
    CHECK(lhs <= norm_h(u) * norm_h(u));
  }
}

TEST_CASE("exponential Euler on the linear hook is first order") {
  // rhs(x) = x on mode 1: exact solution e^{(1 - gamma) t}
  const Forcing identity = [](const SpectralField& x) { return x; };
  const double g = eigenvalue(1), T = 0.05;
  auto error = [&](std::size_t n) {
    const double h = T / static_cast<double>(n);
    SpectralField y = SpectralField::sine(4, 1, 1.0);
    const SpectralField z(4);
    for (std::size_t i = 0; i < n; ++i) y = step(y, z, h, identity);
    return std::abs(2.0 * y.mode(1).imag() + std::exp((1.0 - g) * T));
  };
  const double e1 = error(100), e2 = error(200), e3 = error(400);
  CHECK(e1 < 1e-3);
  CHECK(e2 / e1 == Approx(0.5).epsilon(0.05));
  CHECK(e3 / e2 == Approx(0.5).epsilon(0.05));
  // a single step of the hook
  SpectralField y = SpectralField::sine(4, 1, 1.0);
  const double h = 1e-3;
  y = step(y, SpectralField(4), h, identity);
  const double expect = std::exp(-g * h) + (1 - std::exp(-g * h)) / g;
  CHECK(-2.0 * y.mode(1).imag() == Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(step(SpectralField(4), SpectralField(5), h, identity), DomainError);
}

TEST_CASE("noise off: H norm decays monotonically") {
  const auto t = run(config(32, 1e-3, 2.0, false, SpectralField::sine(32, 1, 2.0)));
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(norm_h(t.states[i]) < norm_h(t.states[i - 1]));
  CHECK(norm_h(t.states.back()) < 1e-20);
}

TEST_CASE("X = Y + Z exactly") {
  auto c = config(32, 1e-3, 0.2, true, SpectralField::sine(32, 1, 0.5));
  const auto t = run(c, 9, true);
  REQUIRE(t.has_channels());
  REQUIRE(t.y.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.states[i] == t.y[i] + t.z[i]);
  CHECK(norm_h(t.z[0]) == 0.0);
  CHECK(t.y[0] == c.initial_state());
}

TEST_CASE("recording stride and time grid") {
  auto c = config(16, 1e-2, 1.05, false, SpectralField::sine(16, 2, 0.3));
  c.record_stride = 10;
  const auto t = run(c);
  // 105 steps: indices 0, 10, ..., 100, 105
  REQUIRE(t.size() == 12);
  CHECK(t.times.front() == 0.0);
  CHECK(t.times.back() == Approx(1.05));
  CHECK(t.times[1] == Approx(0.1));
  std::size_t seen = 0;
  c.record_stride = 1;
  NoiseStreams rng(1, 0, 16);
  SimulateOptions o;
  o.store_states = false;
  o.observer = [&](std::size_t, double, const SpectralField&) { ++seen; };
  const auto t2 = simulate(c, rng, o);
  CHECK(seen == 106);
  CHECK(t2.states.empty());
}

TEST_CASE("config validation") {
  auto c = config(16, 1e-2, 1.0, true, SpectralField(16));
  NoiseStreams rng(1, 0, 16);
  auto bad = c;
  bad.h = 0.0;
  CHECK_THROWS_AS(simulate(bad, rng), DomainError);
  bad = c;
  bad.T = 1e-3;
  CHECK_THROWS_AS(simulate(bad, rng), DomainError);
  bad = c;
  bad.x0 = SpectralField(17);
  CHECK_THROWS_AS(simulate(bad, rng), DomainError);
  bad = c;
  bad.noise = NoiseSpectrum(1.8, 0.8, 8);
  CHECK_THROWS_AS(simulate(bad, rng), DomainError);
  bad = c;
  bad.record_stride = 0;
  CHECK_THROWS_AS(simulate(bad, rng), DomainError);
  // a shorter x0 is zero-padded
  bad = c;
  bad.x0 = SpectralField::sine(4, 1, 1.0);
  CHECK(bad.initial_state().cutoff() == 16);
}

TEST_CASE("mild residual") {
  const auto zero = run(config(16, 1e-3, 0.5, false, SpectralField(16)), 1, true);
  CHECK(mild_residual(zero, config(16, 1e-3, 0.5, false, SpectralField(16))) == 0.0);

  const auto x0 = SpectralField::sine(32, 1, 1.0) + SpectralField::cosine(32, 2, 0.5);
  double prev = 0.0;
  for (double h : {2e-3, 1e-3, 5e-4}) {
    const auto c = config(32, h, 0.5, false, x0);
    const double r = mild_residual(run(c, 1, true), c);
    CAPTURE(h);
    CHECK(r < 1e-3);
    if (prev > 0.0) CHECK(r / prev < 0.75);
    prev = r;
  }
  const auto c = config(32, 1e-3, 0.5, true, x0);
  CHECK(mild_residual(run(c, 4, true), c) < 1e-2);
  const auto no_channels = run(c, 4, false);
  CHECK_THROWS_AS(mild_residual(no_channels, c), DomainError);
}

TEST_CASE("refinement in h and m") {
  const auto x0 = SpectralField::sine(64, 1, 2.0) + SpectralField::sine(64, 3, 1.0);
  const auto a = run(config(64, 1e-3, 0.5, false, x0)).states.back();
  const auto b = run(config(64, 5e-4, 0.5, false, x0)).states.back();
  CHECK(norm_h(a - b) < 0.05 * norm_h(b));

  const auto x32 = with_cutoff(x0, 32);
  const auto c32 = run(config(32, 1e-3, 0.5, true, x32), 11).states.back();
  const auto c64 = run(config(64, 1e-3, 0.5, true, x0), 11).states.back();
  CHECK(norm_h(with_cutoff(c32, 64) - c64) < 0.05 * norm_h(c64));
}

TEST_CASE("overflow guard") {
  CHECK_THROWS_AS(run(config(16, 1e-3, 0.1, false, SpectralField::sine(16, 1, 1e13))),
                  NumericAbort);
  // explicit treatment of the cubic blows up for a coarse step
  CHECK_THROWS_AS(run(config(16, 0.5, 5.0, false, SpectralField::sine(16, 1, 20.0))),
                  NumericAbort);
}
