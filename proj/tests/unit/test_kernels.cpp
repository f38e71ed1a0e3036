// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "sgl/gl_dynamics.hpp"
#include "sgl/kernels.hpp"

using namespace sgl;
using kernels::Backend;

namespace {

std::vector<double> noise(std::size_t n, std::mt19937_64& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct RestoreBackend {
  Backend saved = kernels::active().backend;
  ~RestoreBackend() { kernels::set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar backend is always available") {
  RestoreBackend restore;
  CHECK(kernels::set_backend(Backend::Scalar));
  CHECK(kernels::active().backend == Backend::Scalar);
  CHECK(kernels::backend_name(Backend::Scalar) == "scalar");
}

TEST_CASE("avx2 availability matches the build and the cpu") {
  const auto* t = kernels::avx2_table();
  if (t == nullptr || !kernels::cpu_supports_avx2()) {
    RestoreBackend restore;
    CHECK_FALSE(kernels::set_backend(Backend::Avx2));
    return;
  }
  CHECK(t->backend == Backend::Avx2);
}

TEST_CASE("elementwise kernels are bit-identical across backends") {
  const auto* v = kernels::avx2_table();
  if (v == nullptr || !kernels::cpu_supports_avx2()) return;
  const auto& s = kernels::scalar_table();
  std::mt19937_64 gen(7);
  for (std::size_t modes : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 65u, 127u}) {
    CAPTURE(modes);
    const auto w = noise(modes, gen);
    const auto decay = noise(modes, gen);
    const auto gain = noise(modes, gen);
    const auto g = noise(2 * modes, gen, 3.0);
    auto a = noise(2 * modes, gen, 3.0);
    auto b = a;
    s.scale_modes(a.data(), w.data(), modes);
    v->scale_modes(b.data(), w.data(), modes);
    CHECK(same_bits(a, b));
    s.affine_modes(a.data(), decay.data(), gain.data(), g.data(), modes);
    v->affine_modes(b.data(), decay.data(), gain.data(), g.data(), modes);
    CHECK(same_bits(a, b));
    auto c = noise(2 * modes + 3, gen, 2.0);
    auto d = c;
    s.cubic_residual(c.data(), c.size());
    v->cubic_residual(d.data(), d.size());
    CHECK(same_bits(c, d));
  }
}

TEST_CASE("reductions agree to rounding across backends") {
  const auto* v = kernels::avx2_table();
  if (v == nullptr || !kernels::cpu_supports_avx2()) return;
  const auto& s = kernels::scalar_table();
  std::mt19937_64 gen(11);
  for (std::size_t modes : {0u, 1u, 3u, 4u, 9u, 64u, 257u}) {
    CAPTURE(modes);
    const auto w = noise(modes, gen);
    const auto a = noise(2 * modes, gen);
    const auto b = noise(2 * modes, gen);
    auto rel = [](double x, double y) {
      return std::abs(x - y) <= 1e-13 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    CHECK(rel(s.weighted_sum_sq(a.data(), w.data(), modes),
              v->weighted_sum_sq(a.data(), w.data(), modes)));
    CHECK(rel(s.weighted_diff_sq(a.data(), b.data(), w.data(), modes),
              v->weighted_diff_sq(a.data(), b.data(), w.data(), modes)));
    CHECK(rel(s.sum_sq(a.data(), a.size()), v->sum_sq(a.data(), a.size())));
    CHECK(rel(s.sum_pow4(a.data(), a.size()), v->sum_pow4(a.data(), a.size())));
  }
}

TEST_CASE("scalar kernels match their definitions") {
  const auto& s = kernels::scalar_table();
  const std::vector<double> xy{1.0, 2.0, -3.0, 0.5};
  const std::vector<double> w{2.0, 4.0};
  CHECK(s.weighted_sum_sq(xy.data(), w.data(), 2) == doctest::Approx(2.0 * 5.0 + 4.0 * 9.25));
  std::vector<double> u{2.0, -1.0, 0.5};
  s.cubic_residual(u.data(), u.size());
  CHECK(u[0] == -6.0);
  CHECK(u[1] == 0.0);
  CHECK(u[2] == doctest::Approx(0.375));
}

TEST_CASE("trajectories are bit-identical under either backend") {
  const auto* v = kernels::avx2_table();
  if (v == nullptr || !kernels::cpu_supports_avx2()) return;
  RestoreBackend restore;
  SimConfig cfg;
  cfg.m = 16;
  cfg.T = 0.05;
  cfg.noise = NoiseSpectrum(1.8, 0.8, 16);
  cfg.x0 = SpectralField::sine(16, 1, 0.5);
  auto run = [&](Backend b) {
    REQUIRE(kernels::set_backend(b));
    NoiseStreams rng(3, 0, cfg.m);
    return simulate(cfg, rng).states;
  };
  CHECK(run(Backend::Scalar) == run(Backend::Avx2));
}
