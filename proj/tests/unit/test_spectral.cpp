// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "sgl/spectral.hpp"
#include "support/oracles.hpp"

using namespace sgl;
using doctest::Approx;

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue(1) == Approx(39.4784176043574).epsilon(1e-14));
  CHECK(eigenvalue(-2) == Approx(157.913670417430).epsilon(1e-14));
  CHECK_THROWS_AS(eigenvalue(0), DomainError);
  const auto g = eigenvalues(8);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("field construction") {
  CHECK_THROWS_AS(SpectralField(std::vector<std::complex<double>>{{NAN, 0.0}}), DomainError);
  const auto s = SpectralField::sine(4, 1, 1.0);
  CHECK(s.mode(1) == std::complex<double>(0.0, -0.5));
  const auto c = SpectralField::cosine(4, 2, 3.0);
  CHECK(c.mode(2) == std::complex<double>(1.5, 0.0));
  CHECK(oracle::eval_point(s, 0.25) == Approx(1.0));
  CHECK(oracle::eval_point(c, 0.0) == Approx(3.0));
}

TEST_CASE("fractional powers and semigroup") {
  const auto s = SpectralField::sine(8, 1, 1.0);
  CHECK(apply_fractional_power(s, 0.0) == s);
  const auto half = apply_fractional_power(s, 0.5);
  for (double xi : {0.1, 0.3, 0.77})
    CHECK(oracle::eval_point(half, xi) == Approx(2.0 * kPi * std::sin(kTwoPi * xi)));
  const auto one = apply_fractional_power(s, 1.0);
  CHECK(oracle::eval_point(one, 0.25) == Approx(4.0 * kPi * kPi));

  CHECK(apply_semigroup(s, 0.0) == s);
  CHECK_THROWS_AS(apply_semigroup(s, -1e-3), DomainError);
  const auto e = apply_semigroup(s, 0.01);
  CHECK(oracle::eval_point(e, 0.25) == Approx(std::exp(-0.394784176043574)).epsilon(1e-13));

  // Oracle: RK4 on x' = -gamma_1 x for the single active mode.
  double y = 1.0;
  const double g = 4.0 * kPi * kPi, dt = 1e-5;
  for (int i = 0; i < 1000; ++i) {
    const double k1 = -g * y, k2 = -g * (y + 0.5 * dt * k1), k3 = -g * (y + 0.5 * dt * k2),
                 k4 = -g * (y + dt * k3);
    y += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(oracle::eval_point(e, 0.25) == Approx(y).epsilon(1e-10));
}

TEST_CASE("smoothing bound sup_k gamma^sigma e^{-gamma t} <= (sigma / (e t))^sigma") {
  const auto g = eigenvalues(512);
  for (double sigma : {0.25, 0.5, 1.0, 1.5}) {
    for (double t : {1e-4, 1e-3, 1e-2, 0.1}) {
      double sup = 0.0;
      for (double gk : g) sup = std::max(sup, std::pow(gk, sigma) * std::exp(-gk * t));
      CHECK(sup <= std::pow(sigma / (std::exp(1.0) * t), sigma) * (1 + 1e-12));
    }
  }
}

TEST_CASE("norms") {
  const auto s = SpectralField::sine(8, 1, 1.0);
  CHECK(norm_h(s) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(norm_v(s) == Approx(std::sqrt(2.0) * kPi));
  const SpectralField z(8);
  CHECK(norm_h(z) == 0.0);
  CHECK(norm_v(z) == 0.0);
  CHECK(norm_lp(z, 4.0) == 0.0);
  CHECK(norm_lp(z, 3.0) == 0.0);
  CHECK_THROWS_AS(norm_lp(s, 0.5), DomainError);
  CHECK_THROWS_AS(norm_lp(s, 2.0, 17), DomainError);
  CHECK_THROWS_AS(norm_lp(s, 2.0, 16), DomainError);  // < 2m + 2
  // ||sin||_4^4 = 3/8
  CHECK(std::pow(norm_lp(s, 4.0), 4.0) == Approx(0.375).epsilon(1e-13));
  CHECK(distance_frac(s, z, 0.5) == Approx(norm_v(s)));
}

TEST_CASE("norm identities on random fields") {
  std::mt19937_64 gen(42);
  for (int i = 0; i < 200; ++i) {
    const auto x = oracle::random_field(32, 32, 3.0, gen);
    const double h = norm_h(x), v = norm_v(x);
    CHECK(h * h == Approx(oracle::norm_sq_weighted(x, 0.0)).epsilon(1e-12));
    CHECK(v * v == Approx(oracle::norm_sq_weighted(x, 0.5)).epsilon(1e-12));
    // Parseval for the grid L^2 norm
    CHECK(norm_lp(x, 2.0) == Approx(h).epsilon(1e-10));
    CHECK(std::pow(norm_lp(x, 4.0), 4) == Approx(oracle::lp_pow(x, 4.0, 128)).epsilon(1e-10));
    CHECK(std::pow(norm_lp(x, 3.0), 3) == Approx(oracle::lp_pow(x, 3.0, 128)).epsilon(1e-10));
    // spectral gap
    CHECK(h <= v / std::sqrt(eigenvalue(1)) * (1 + 1e-12));
    // L4 interpolation inequality
    const double l4 = norm_lp(x, 4.0);
    CHECK(std::pow(l4, 4) <= v * v * h * h * (1 + 1e-8));
  }
}

TEST_CASE("galerkin projection") {
  std::mt19937_64 gen(5);
  const auto x = oracle::random_field(16, 16, 2.0, gen);
  CHECK(project_galerkin(x, 16) == x);
  CHECK(project_galerkin(SpectralField::sine(4, 3, 1.0), 2) == SpectralField(4));
  CHECK_THROWS_AS(project_galerkin(x, 17), DomainError);
  for (std::size_t mp = 1; mp <= 16; ++mp) {
    const auto p = project_galerkin(x, mp);
    CHECK(project_galerkin(p, mp) == p);
    CHECK(norm_h(p) <= norm_h(x));
    CHECK(norm_h(x - p) <= norm_v(x) / std::sqrt(eigenvalue(static_cast<long>(mp) + 1)) *
                               (1 + 1e-12));
  }
  const auto grown = with_cutoff(x, 20);
  CHECK(grown.cutoff() == 20);
  CHECK(with_cutoff(grown, 16) == x);
}

TEST_CASE("physical transforms") {
  std::mt19937_64 gen(9);
  const auto x = oracle::random_field(16, 16, 5.0, gen);
  const auto back = from_physical(to_physical(x, 64), 16);
  double worst = 0.0;
  for (std::size_t k = 1; k <= 16; ++k) worst = std::max(worst, std::abs(back.mode(k) - x.mode(k)));
  CHECK(worst < 1e-12);

  const auto direct = oracle::samples(x, 64);
  const auto fast = to_physical(x, 64);
  for (std::size_t j = 0; j < 64; ++j) CHECK(fast[j] == Approx(direct[j]).epsilon(1e-12));

  const std::vector<double> constant(64, 3.0);
  CHECK(norm_h(from_physical(constant, 16)) < 1e-15);

  std::vector<double> sine(64);
  for (std::size_t j = 0; j < 64; ++j) sine[j] = std::sin(kTwoPi * j / 64.0);
  const auto f = from_physical(sine, 16);
  CHECK(std::abs(f.mode(1)) == Approx(0.5));
  for (std::size_t k = 2; k <= 16; ++k) CHECK(std::abs(f.mode(k)) < 1e-15);

  CHECK_THROWS_AS(to_physical(x, 32), DomainError);
  CHECK_THROWS_AS(to_physical(x, 35), DomainError);
  CHECK_THROWS_AS(from_physical(std::vector<double>(33), 16), DomainError);
}

TEST_CASE("field arithmetic") {
  const auto a = SpectralField::sine(4, 1, 1.0);
  const auto b = SpectralField::cosine(4, 2, 1.0);
  CHECK((a + b - b) == a);
  CHECK((2.0 * a).mode(1) == a.mode(1) * 2.0);
  CHECK(inner_h(a, a) == Approx(0.5));
  CHECK(inner_h(a, b) == Approx(0.0));
  SpectralField c(3);
  CHECK_THROWS_AS(c += a, DomainError);
}
