// SPDX-License-Identifier: Apache-2.0
//
// Time integration of dX + AX dt = N(X) dt + dL with N(u) = u - u^3, split as
// X = Y + Z: Z is the exactly sampled OU convolution, Y solves
// dY/dt + AY = N(Y + Z) and is advanced by exponential Euler with the
// left-endpoint value N(Y_n + Z_n).

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sgl/spectral.hpp"
#include "sgl/stable_noise.hpp"

namespace sgl {

// Field norm exceeded the overflow guard: the step is too large for the
// realized jumps.
class NumericAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kOverflowGuard = 1e12;

struct SimConfig {
  std::size_t m = 64;
  double h = 1e-3;
  double T = 10.0;
  bool dealias = true;
  NoiseSpectrum noise{1.8, 0.8, 64};
  SpectralField x0{64};
  // Keep every record_stride-th state (the last state is always kept).
  std::size_t record_stride = 1;

  // Throws DomainError on violated preconditions.
  void validate() const;
  std::size_t steps() const;
  // x0 at cutoff m.
  SpectralField initial_state() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  // Present when requested; states[i] == y[i] + z[i] exactly.
  std::vector<SpectralField> y;
  std::vector<SpectralField> z;

  std::size_t size() const noexcept { return states.size(); }
  bool has_channels() const noexcept { return !y.empty(); }
};

// pi_m(u - u^3) by pseudospectral evaluation on a 4m-point grid. With
// dealias set, modes above floor(2m/3) of u are zeroed before cubing.
SpectralField nonlinearity(const SpectralField& u, bool dealias = true);

// Allocation-free variant used by the steppers; `out` must have u's cutoff.
void nonlinearity_into(const SpectralField& u, SpectralField& out, bool dealias);

using Forcing = std::function<SpectralField(const SpectralField&)>;

// Exponential-Euler weights for a fixed (m, h).
class ExpEulerStepper {
 public:
  ExpEulerStepper(std::size_t m, double h);

  // y <- e^{-Ah} y + phi_1(h) g, phi_1 = (1 - e^{-gamma h}) / gamma per mode.
  void advance(SpectralField& y, const SpectralField& g) const;

  std::span<const double> decay() const noexcept { return decay_; }
  std::span<const double> phi1() const noexcept { return phi1_; }
  double step() const noexcept { return h_; }

 private:
  double h_;
  std::vector<double> decay_;
  std::vector<double> phi1_;
};

// One Y step with N(Y + Z) at the left endpoint.
SpectralField step(const SpectralField& y, const SpectralField& z, double h,
                   const SimConfig& cfg);
// Same with a substitute right-hand side (test hook).
SpectralField step(const SpectralField& y, const SpectralField& z, double h,
                   const Forcing& rhs);

// Called for every recorded snapshot: (index in the step grid, time, X).
using Observer = std::function<void(std::size_t, double, const SpectralField&)>;

struct SimulateOptions {
  bool keep_channels = false;
  // When false, states are only passed to the observer and not stored.
  bool store_states = true;
  Observer observer;
};

// X_n = Y_n + Z_n on {0, h, ..., T} with Y_0 = x0, Z_0 = 0. Throws
// NumericAbort if ||X||_H exceeds the guard or becomes non-finite.
Trajectory simulate(const SimConfig& cfg, NoiseStreams& rng,
                    const SimulateOptions& opts = {});

// Same integrator with Z supplied as snapshots on the step grid
// (z_path.size() == steps + 1, z_path[0] is used as Z_0).
Trajectory simulate_driven(const SimConfig& cfg, std::span<const SpectralField> z_path,
                           const SimulateOptions& opts = {});

// max_n ||Y_n - e^{-A t_n} x0 - I_n||_H where I_n integrates
// e^{-A(t_n - s)} N(X_s) with exact weights for N linear between snapshots.
// Needs a trajectory with channels and record_stride 1.
double mild_residual(const Trajectory& traj, const SimConfig& cfg);

}  // namespace sgl
