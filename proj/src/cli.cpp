// SPDX-License-Identifier: Apache-2.0

#include "sgl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "sgl/control.hpp"
#include "sgl/ergodics.hpp"
#include "sgl/gl_dynamics.hpp"
#include "sgl/kernels.hpp"
#include "sgl/lyapunov.hpp"
#include "sgl/parallel.hpp"
#include "sgl/stable_noise.hpp"

namespace sgl::cli {

using io::json;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json zero_field() { return {{"coeffs", json::array()}}; }
json sine_field(double amp) { return {{"sine", json::array({json::array({1, amp})})}}; }

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "noise-test", "control", "drift",
                                              "ergodic",  "mdp",        "validate"};
  return names;
}

json default_config() {
  json c;
  c["seed"] = 1;
  c["threads"] = 1;
  c["noise"] = {{"alpha", 1.8}, {"beta", 0.8}, {"enabled", true}};
  c["simulation"] = {{"m", 64},          {"h", 1e-3},      {"T", 10.0},
                     {"dealias", true},  {"record_stride", 10},
                     {"x0", sine_field(0.5)}};
  c["noise_test"] = {{"draws", 100000},
                     {"alphas", {1.6, 1.8, 1.95}},
                     {"thetas", {0.5, 1.0, 2.0}},
                     {"m", 32},
                     {"h", 1e-2},
                     {"horizons", {1.0, 2.0, 4.0, 8.0, 16.0}},
                     {"paths", 200},
                     {"p", 1.0},
                     {"theta_powers", {0.0, 0.2}}};
  c["control"] = {{"m", 32},      {"h", 1e-4},   {"T", 1.0},
                  {"t0", 0.5},    {"eps", 0.05}, {"x0", sine_field(0.5)},
                  {"target", sine_field(0.3)},   {"csv_stride", 10}};
  c["drift"] = {{"samples", 1000}, {"sphere_factor", 2.0}, {"sample_modes", 8}};
  c["ergodic"] = {{"members", 100},   {"clip", 10.0},          {"T", 10.0},
                  {"record_stride", 10}, {"x0_a", zero_field()}, {"x0_b", sine_field(0.5)}};
  c["mdp"] = {{"members", 1000}, {"kappa", 0.25},       {"clip", 10.0},
              {"T", 1.024},      {"pi_horizon", 50.0},  {"burn_fraction", 0.2},
              {"batches", 20},   {"x0", zero_field()}};
  return c;
}

json resolve_config(const json& user) {
  json resolved = default_config();
  if (user.is_null()) return resolved;
  if (!user.is_object()) throw DomainError("config: top level must be a JSON object");
  resolved.merge_patch(user);
  return resolved;
}

namespace {

// ----- validation -----------------------------------------------------------

struct Checks {
  std::vector<Diagnostic> out;

  void error(std::string msg) { out.push_back({true, std::move(msg)}); }
  void warning(std::string msg) { out.push_back({false, std::move(msg)}); }

  // Runs `fn`, turning JSON type errors and DomainErrors into diagnostics.
  template <class Fn>
  void guarded(const std::string& where, Fn&& fn) {
    try {
      fn();
    } catch (const json::exception& e) {
      error(where + ": " + e.what());
    } catch (const DomainError& e) {
      error(where + ": " + e.what());
    }
  }
};

double num(const json& block, const char* key) { return block.at(key).get<double>(); }

std::size_t count(const json& block, const char* key) {
  const auto& v = block.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw DomainError(std::string(key) + " must be a non-negative integer");
  return v.get<std::size_t>();
}

void check_noise(const json& r, Checks& c) {
  c.guarded("noise", [&] {
    const auto& n = r.at("noise");
    const double alpha = num(n, "alpha");
    const double beta = num(n, "beta");
    n.at("enabled").get<bool>();
    if (!(alpha > 1.0 && alpha < 2.0)) c.error("noise: alpha must lie in (1, 2)");
    const double lo = NoiseSpectrum::min_beta(alpha);
    if (!(beta > lo))
      c.error("noise: beta must exceed 1/2 + 1/(2 alpha) = " + io::format_double(lo));
    const double hi = 1.5 - 1.0 / alpha;
    if (beta > lo && !(beta < hi))
      c.warning("noise: beta >= 3/2 - 1/alpha = " + io::format_double(hi) +
                " lies outside the strong Feller / ergodicity band; simulation is defined "
                "but ergodic statements are not covered");
  });
}

void check_simulation(const json& r, Checks& c) {
  c.guarded("simulation", [&] {
    const auto& s = r.at("simulation");
    const std::size_t m = count(s, "m");
    const double h = num(s, "h");
    const double T = num(s, "T");
    s.at("dealias").get<bool>();
    if (m == 0) c.error("simulation: m must be >= 1");
    if (!(h > 0.0)) c.error("simulation: h must be > 0");
    if (!(T >= h)) c.error("simulation: T must be >= h");
    if (count(s, "record_stride") == 0) c.error("simulation: record_stride must be >= 1");
    if (m > 0) {
      const auto x0 = io::field_from_json(s.at("x0"), m);
      if (x0.cutoff() > m) c.error("simulation: x0 cutoff exceeds m");
    }
  });
}

void check_noise_test(const json& r, Checks& c) {
  c.guarded("noise_test", [&] {
    const auto& b = r.at("noise_test");
    if (count(b, "draws") < 1000) c.error("noise_test: draws must be >= 1000");
    for (const auto& a : b.at("alphas"))
      if (!(a.get<double>() > 1.0 && a.get<double>() <= 2.0))
        c.error("noise_test: alphas must lie in (1, 2]");
    for (const auto& t : b.at("thetas")) t.get<double>();
    if (count(b, "m") == 0) c.error("noise_test: m must be >= 1");
    if (!(num(b, "h") > 0.0)) c.error("noise_test: h must be > 0");
    if (b.at("horizons").empty()) c.error("noise_test: horizons must be non-empty");
    for (const auto& t : b.at("horizons"))
      if (!(t.get<double>() > 0.0)) c.error("noise_test: horizons must be > 0");
    if (count(b, "paths") == 0) c.error("noise_test: paths must be >= 1");
    const double alpha = num(r.at("noise"), "alpha");
    const double beta = num(r.at("noise"), "beta");
    const double p = num(b, "p");
    if (!(p > 0.0 && p < alpha)) c.error("noise_test: p must lie in (0, alpha)");
    for (const auto& t : b.at("theta_powers")) {
      const double th = t.get<double>();
      if (!(th >= 0.0 && th < beta - 0.5 / alpha))
        c.error("noise_test: theta_powers must lie in [0, beta - 1/(2 alpha))");
    }
  });
}

void check_control(const json& r, Checks& c) {
  c.guarded("control", [&] {
    const auto& b = r.at("control");
    const std::size_t m = count(b, "m");
    const double T = num(b, "T");
    const double t0 = num(b, "t0");
    if (m == 0) c.error("control: m must be >= 1");
    if (!(num(b, "h") > 0.0)) c.error("control: h must be > 0");
    if (!(T > 0.0)) c.error("control: T must be > 0");
    if (!(t0 > 0.0 && t0 < T)) c.error("control: t0 must lie in (0, T)");
    if (!(num(b, "eps") > 0.0)) c.error("control: eps must be > 0");
    if (count(b, "csv_stride") == 0) c.error("control: csv_stride must be >= 1");
    if (m > 0) {
      io::field_from_json(b.at("x0"), m);
      const auto a = io::field_from_json(b.at("target"), m);
      if (a.cutoff() > m) c.error("control: target must be band-limited to the cutoff m");
    }
  });
}

void check_drift(const json& r, Checks& c) {
  c.guarded("drift", [&] {
    const auto& b = r.at("drift");
    count(b, "samples");
    if (!(num(b, "sphere_factor") > 1.0)) c.error("drift: sphere_factor must be > 1");
    const std::size_t modes = count(b, "sample_modes");
    const std::size_t m = count(r.at("simulation"), "m");
    if (modes == 0 || modes > m) c.error("drift: sample_modes must lie in 1..simulation.m");
  });
}

void check_ergodic(const json& r, Checks& c) {
  c.guarded("ergodic", [&] {
    const auto& b = r.at("ergodic");
    if (count(b, "members") < 2) c.error("ergodic: members must be >= 2");
    if (!(num(b, "clip") > 0.0)) c.error("ergodic: clip must be > 0");
    if (!(num(b, "T") >= num(r.at("simulation"), "h"))) c.error("ergodic: T must be >= h");
    if (count(b, "record_stride") == 0) c.error("ergodic: record_stride must be >= 1");
    const std::size_t m = count(r.at("simulation"), "m");
    if (m > 0) {
      io::field_from_json(b.at("x0_a"), m);
      io::field_from_json(b.at("x0_b"), m);
    }
  });
}

void check_mdp(const json& r, Checks& c) {
  c.guarded("mdp", [&] {
    const auto& b = r.at("mdp");
    if (count(b, "members") < 1000) c.error("mdp: members must be >= 1000 for the tail check");
    const double kappa = num(b, "kappa");
    if (!(kappa > 0.0 && kappa < 0.5)) c.error("mdp: kappa must lie in (0, 1/2)");
    if (!(num(b, "clip") > 0.0)) c.error("mdp: clip must be > 0");
    const double h = num(r.at("simulation"), "h");
    if (!(num(b, "T") >= h)) c.error("mdp: T must be >= h");
    const double burn = num(b, "burn_fraction");
    if (!(burn >= 0.0 && burn < 1.0)) c.error("mdp: burn_fraction must lie in [0, 1)");
    const std::size_t batches = count(b, "batches");
    if (batches < 10) c.error("mdp: batches must be >= 10");
    const double horizon = num(b, "pi_horizon");
    if (h > 0.0 && horizon > 0.0) {
      const double kept = std::floor(horizon / h * (1.0 - burn));
      if (kept < 50.0 * static_cast<double>(batches))
        c.error("mdp: pi_horizon too short for 50 steps per batch after burn-in");
    } else {
      c.error("mdp: pi_horizon must be > 0");
    }
    const std::size_t m = count(r.at("simulation"), "m");
    if (m > 0) io::field_from_json(b.at("x0"), m);
  });
}

}  // namespace

std::vector<Diagnostic> validate_config(const json& resolved, const std::string& subcommand) {
  Checks c;
  const json defaults = default_config();
  for (const auto& [key, value] : resolved.items())
    if (!defaults.contains(key)) c.warning("unknown top-level key \"" + key + "\" is ignored");
  for (const auto& [key, value] : defaults.items()) {
    if (!value.is_object() || !resolved.contains(key) || !resolved.at(key).is_object()) continue;
    for (const auto& [sub, v] : resolved.at(key).items())
      if (!value.contains(sub)) c.warning("unknown key \"" + key + "." + sub + "\" is ignored");
  }
  c.guarded("seed", [&] { resolved.at("seed").get<std::uint64_t>(); });
  c.guarded("threads", [&] {
    if (resolved.at("threads").get<unsigned>() == 0) c.error("threads must be >= 1");
  });
  const bool all = subcommand == "validate";
  check_noise(resolved, c);
  check_simulation(resolved, c);
  if (all || subcommand == "noise-test") check_noise_test(resolved, c);
  if (all || subcommand == "control") check_control(resolved, c);
  if (all || subcommand == "drift") check_drift(resolved, c);
  if (all || subcommand == "ergodic") check_ergodic(resolved, c);
  if (all || subcommand == "mdp") check_mdp(resolved, c);
  return c.out;
}

namespace {

// ----- experiment plumbing ----------------------------------------------------

struct Context {
  json resolved;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out;
  json summary = json::object();
};

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream os(ctx.out / name, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + (ctx.out / name).string());
  return os;
}

NoiseSpectrum noise_for(const json& r, std::size_t m) {
  const auto& n = r.at("noise");
  const double alpha = num(n, "alpha");
  const double beta = num(n, "beta");
  return n.at("enabled").get<bool>() ? NoiseSpectrum(alpha, beta, m)
                                     : NoiseSpectrum::silent(alpha, beta, m);
}

SimConfig sim_config(const json& r) {
  const auto& s = r.at("simulation");
  SimConfig cfg;
  cfg.m = count(s, "m");
  cfg.h = num(s, "h");
  cfg.T = num(s, "T");
  cfg.dealias = s.at("dealias").get<bool>();
  cfg.record_stride = count(s, "record_stride");
  cfg.noise = noise_for(r, cfg.m);
  cfg.x0 = io::field_from_json(s.at("x0"), cfg.m);
  return cfg;
}

double gaussian(RngStream& rng) {
  const double u = rng.uniform_open();
  const double v = rng.uniform_open();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
}

double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

void run_simulate(Context& ctx) {
  const SimConfig cfg = sim_config(ctx.resolved);
  NoiseStreams rng(ctx.seed, 0, cfg.m);
  const Trajectory traj = simulate(cfg, rng);
  auto os = open_out(ctx, "trajectory.csv");
  io::write_trajectory_csv(os, traj);
  double max_h = 0.0;
  for (const auto& x : traj.states) max_h = std::max(max_h, norm_h(x));
  ctx.summary = {{"steps", cfg.steps()},
                 {"snapshots", traj.size()},
                 {"final_norm_h", norm_h(traj.states.back())},
                 {"final_norm_v", norm_v(traj.states.back())},
                 {"max_norm_h", max_h}};
}

void run_noise_test(Context& ctx) {
  const auto& b = ctx.resolved.at("noise_test");
  const std::size_t draws = count(b, "draws");
  const auto thetas = b.at("thetas").get<std::vector<double>>();
  const auto alphas = b.at("alphas").get<std::vector<double>>();

  auto cf = open_out(ctx, "cf.csv");
  io::CsvWriter cf_csv(cf, {"alpha", "theta", "empirical", "exact", "abs_err"});
  double worst = 0.0;
  std::vector<double> sample(draws);
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    RngStream rng(ctx.seed, kStreamSampler, ai);
    for (double& v : sample) v = sample_standard_stable(alphas[ai], rng);
    for (double th : thetas) {
      double acc = 0.0;
      for (double v : sample) acc += std::cos(th * v);
      const double emp = acc / static_cast<double>(draws);
      const double exact = std::exp(-std::pow(std::abs(th), alphas[ai]));
      worst = std::max(worst, std::abs(emp - exact));
      cf_csv.row({alphas[ai], th, emp, exact, std::abs(emp - exact)});
    }
  }

  const std::size_t m = count(b, "m");
  const NoiseSpectrum spec = noise_for(ctx.resolved, m);
  const auto horizons = b.at("horizons").get<std::vector<double>>();
  const double p = num(b, "p");
  auto mx = open_out(ctx, "maximal.csv");
  io::CsvWriter mx_csv(mx, {"theta", "T", "statistic"});
  json slopes = json::array();
  for (double th : b.at("theta_powers").get<std::vector<double>>()) {
    const auto curve = maximal_statistic_curve(spec, num(b, "h"), horizons, th, p,
                                               count(b, "paths"), ctx.seed, ctx.threads);
    for (std::size_t j = 0; j < horizons.size(); ++j) mx_csv.row({th, horizons[j], curve[j]});
    const bool positive =
        std::all_of(curve.begin(), curve.end(), [](double v) { return v > 0.0; });
    slopes.push_back({{"theta", th},
                      {"slope", positive ? log_log_slope(horizons, curve) : 0.0},
                      {"bound_p_over_alpha", p / spec.alpha()}});
  }
  ctx.summary = {{"cf_max_abs_err", worst}, {"maximal_slopes", slopes}};
}

void run_control(Context& ctx) {
  const auto& b = ctx.resolved.at("control");
  SimConfig cfg;
  cfg.m = count(b, "m");
  cfg.h = num(b, "h");
  cfg.T = num(b, "T");
  cfg.dealias = ctx.resolved.at("simulation").at("dealias").get<bool>();
  cfg.noise = NoiseSpectrum::silent(num(ctx.resolved.at("noise"), "alpha"),
                                    num(ctx.resolved.at("noise"), "beta"), cfg.m);
  cfg.x0 = io::field_from_json(b.at("x0"), cfg.m);
  const SpectralField a = io::field_from_json(b.at("target"), cfg.m);
  const double t0 = num(b, "t0");
  const ControlPlan plan = synthesize(cfg.x0, a, cfg.T, num(b, "eps"), cfg, t0);
  const Reachability reach = verify_reachability(plan);

  const std::size_t stride = count(b, "csv_stride");
  const std::size_t n0 = plan.switch_index();
  auto os = open_out(ctx, "plan.csv");
  io::CsvWriter csv(os, {"t", "norm_u_v", "norm_x_v"});
  {
    SimConfig free_cfg = cfg;
    free_cfg.T = plan.t0;
    free_cfg.record_stride = 1;
    NoiseStreams unused(0, 0, 0);
    SimulateOptions opts;
    opts.store_states = false;
    opts.observer = [&](std::size_t n, double t, const SpectralField& x) {
      if (n < n0 && n % stride == 0) csv.row({t, 0.0, norm_v(x)});
    };
    simulate(free_cfg, unused, opts);
  }
  for (std::size_t n = n0; n <= plan.steps(); ++n) {
    if ((n - n0) % stride != 0 && n != plan.steps()) continue;
    const double t = static_cast<double>(n) * plan.h;
    csv.row({t, norm_v(plan.controls[n]), norm_v(plan.line_state(t))});
  }
  ctx.summary = {{"theta_s", plan.theta_s},
                 {"t0", plan.t0},
                 {"terminal_error", reach.terminal_error},
                 {"solver_error", reach.solver_error},
                 {"sup_u_V", plan.sup_u_v},
                 {"eps", num(b, "eps")},
                 {"reached", reach.terminal_error < num(b, "eps")}};
}

void run_drift(Context& ctx) {
  const auto& b = ctx.resolved.at("drift");
  const std::size_t m = count(ctx.resolved.at("simulation"), "m");
  const NoiseSpectrum spec = noise_for(ctx.resolved, m);
  const double M = choose_M(spec);
  const std::size_t samples = count(b, "samples");
  const std::size_t modes = count(b, "sample_modes");
  const double factor = num(b, "sphere_factor");

  // First half on the sphere ||x||_V^2 = factor M, second half inside K.
  std::vector<SpectralField> states;
  std::vector<std::string> sets;
  for (std::size_t s = 0; s < 2 * samples; ++s) {
    RngStream rng(ctx.seed, kStreamStates, s);
    SpectralField x(m);
    for (std::size_t k = 1; k <= modes; ++k)
      x.set_mode(k, {gaussian(rng) / static_cast<double>(k),
                     gaussian(rng) / static_cast<double>(k)});
    const bool sphere = s < samples;
    const double target_sq = sphere ? factor * M : M * rng.uniform_open();
    x *= std::sqrt(target_sq) / norm_v(x);
    states.push_back(std::move(x));
    sets.push_back(sphere ? "sphere" : "ball");
  }
  const DriftSummary sum = certify_drift(states, spec, M);

  auto os = open_out(ctx, "drift.csv");
  io::CsvWriter csv(os, {"index", "sphere", "norm_h", "norm_v", "psi", "j1_exact", "j2_bound",
                         "j3_bound", "j4_bound", "drift_ratio_lower", "in_K"});
  for (std::size_t i = 0; i < sum.reports.size(); ++i) {
    const auto& r = sum.reports[i];
    csv.row({static_cast<double>(i), sets[i] == "sphere" ? 1.0 : 0.0, r.norm_h, r.norm_v, r.psi,
             r.j1_exact, r.j2_bound, r.j3_bound, r.j4_bound, r.drift_ratio_lower,
             r.in_K ? 1.0 : 0.0});
  }
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  const JumpSums js = jump_sums(spec);
  ctx.summary = {{"M", M},
                 {"c_norm", spec.levy_norm()},
                 {"sum_beta_sq", js.sum_sq},
                 {"sum_abs_beta", js.sum_abs},
                 {"n_K", sum.n_K},
                 {"n_Kc", sum.n_Kc},
                 {"n_violations_Kc", sum.n_violations_Kc},
                 {"n_violations_K", sum.n_violations_K},
                 {"min_ratio_Kc", finite_or_null(sum.min_ratio_Kc)},
                 {"min_ratio_K", finite_or_null(sum.min_ratio_K)}};
}

void run_ergodic(Context& ctx) {
  const auto& b = ctx.resolved.at("ergodic");
  SimConfig cfg = sim_config(ctx.resolved);
  cfg.T = num(b, "T");
  cfg.record_stride = count(b, "record_stride");
  const Observable f = energy_observable(num(b, "clip"));
  const std::size_t members = count(b, "members");
  const SpectralField xa = io::field_from_json(b.at("x0_a"), cfg.m);
  const SpectralField xb = io::field_from_json(b.at("x0_b"), cfg.m);

  cfg.x0 = xa;
  const EnsembleStats ea = ensemble_stats(cfg, f, members, ctx.seed, "x0_a", ctx.threads);
  cfg.x0 = xb;
  const EnsembleStats eb = ensemble_stats(cfg, f, members, ctx.seed, "x0_b", ctx.threads);
  const double M = choose_M(cfg.noise);
  const RateFit fit = rate_fit(ea, eb, psi(xa, M), psi(xb, M));

  auto os = open_out(ctx, "ensemble.csv");
  io::CsvWriter csv(os, {"t", "mean_a", "mean_b", "mom_a", "mom_b", "gap"});
  for (std::size_t j = 0; j < ea.times.size(); ++j)
    csv.row({ea.times[j], ea.mean[j], eb.mean[j], ea.median_of_means[j],
             eb.median_of_means[j], std::abs(ea.mean[j] - eb.mean[j])});
  ctx.summary = {{"rho_hat", fit.rho_hat}, {"theta_hat", fit.theta_hat},
                 {"r2", fit.r2},           {"fit_ok", fit.ok},
                 {"reason", fit.reason},   {"n_points", fit.n_points},
                 {"floor", fit.floor},     {"M", M},
                 {"members", members},     {"observable", f.name}};
}

void run_mdp(Context& ctx) {
  const auto& b = ctx.resolved.at("mdp");
  SimConfig cfg = sim_config(ctx.resolved);
  const Observable f = energy_observable(num(b, "clip"));
  const double kappa = num(b, "kappa");
  cfg.x0 = io::field_from_json(b.at("x0"), cfg.m);
  cfg.record_stride = 1;

  // pi(f) and sigma^2(f) from one long run after burn-in
  SimConfig long_cfg = cfg;
  long_cfg.T = num(b, "pi_horizon");
  const std::size_t long_steps = long_cfg.steps();
  const auto burn = static_cast<std::size_t>(
      std::floor(num(b, "burn_fraction") * static_cast<double>(long_steps)));
  std::vector<double> series;
  series.reserve(long_steps - burn);
  {
    NoiseStreams rng(ctx.seed, kStreamLongRun, cfg.m);
    SimulateOptions opts;
    opts.store_states = false;
    opts.observer = [&](std::size_t n, double, const SpectralField& x) {
      if (n >= burn && n < long_steps) series.push_back(f(x));
    };
    simulate(long_cfg, rng, opts);
  }
  const double pi_hat = std::accumulate(series.begin(), series.end(), 0.0) /
                        static_cast<double>(series.size());
  const double sigma2 = sigma2_batch_means(series, cfg.h, count(b, "batches"));

  cfg.T = num(b, "T");
  const std::size_t steps = cfg.steps();
  std::vector<std::size_t> marks;
  for (std::size_t n = 64; n <= 1024 && n <= steps; n *= 2) marks.push_back(n);
  if (marks.empty() || marks.back() != steps) marks.push_back(steps);

  const std::size_t members = count(b, "members");
  std::vector<std::vector<double>> values(members, std::vector<double>(marks.size()));
  parallel_for(members, ctx.threads, [&](std::size_t i) {
    NoiseStreams rng(ctx.seed, i, cfg.m);
    std::vector<double> fx;
    fx.reserve(steps);
    SimulateOptions opts;
    opts.store_states = false;
    opts.observer = [&](std::size_t n, double, const SpectralField& x) {
      if (n < steps) fx.push_back(f(x));
    };
    simulate(cfg, rng, opts);
    for (std::size_t j = 0; j < marks.size(); ++j)
      values[i][j] = mdp_functional(std::span<const double>(fx.data(), marks[j]), cfg.h,
                                    kappa, pi_hat);
  });

  auto os = open_out(ctx, "mdp.csv");
  io::CsvWriter csv(os, {"member", "t", "value"});
  for (std::size_t i = 0; i < members; ++i)
    for (std::size_t j = 0; j < marks.size(); ++j)
      csv.row({static_cast<double>(i), static_cast<double>(marks[j]) * cfg.h, values[i][j]});

  json medians = json::array();
  for (std::size_t j = 0; j < marks.size(); ++j) {
    std::vector<double> col(members);
    for (std::size_t i = 0; i < members; ++i) col[i] = std::abs(values[i][j]);
    std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(members / 2),
                     col.end());
    medians.push_back({{"t", static_cast<double>(marks[j]) * cfg.h},
                       {"median_abs", col[members / 2]}});
  }
  std::vector<double> final_values(members);
  for (std::size_t i = 0; i < members; ++i) final_values[i] = values[i].back();
  const double t_end = static_cast<double>(steps) * cfg.h;
  const TailReport tail = mdp_tail_check(final_values, sigma2, std::pow(t_end, kappa));
  json ratios = json::array();
  for (double r : tail.ratio) ratios.push_back(std::isfinite(r) ? json(r) : json(nullptr));
  ctx.summary = {{"pi_f_hat", pi_hat},       {"sigma2", sigma2},
                 {"kappa", kappa},           {"b", tail.b},
                 {"tail_ratios", ratios},    {"tail_pass", tail.pass},
                 {"tail_degenerate", tail.degenerate},
                 {"median_abs", medians},    {"members", members}};
}

json diagnostics_json(const std::vector<Diagnostic>& diags, bool errors) {
  json out = json::array();
  for (const auto& d : diags)
    if (d.error == errors) out.push_back(d.message);
  return out;
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
  auto os = open_out(ctx, name);
  os << j.dump(2) << '\n';
}

}  // namespace

int run(const RunRequest& request, std::ostream& log) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), request.subcommand) == names.end()) {
    log << "error: unknown subcommand \"" << request.subcommand << "\"\n";
    return kExitValidation;
  }
  const auto started = std::chrono::steady_clock::now();
  Context ctx;
  try {
    ctx.resolved = resolve_config(request.config);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  if (request.seed_given) ctx.resolved["seed"] = request.seed;
  if (request.threads_given) ctx.resolved["threads"] = request.threads;

  const auto diags = validate_config(ctx.resolved, request.subcommand);
  bool failed = false;
  for (const auto& d : diags) {
    log << (d.error ? "error: " : "warning: ") << d.message << '\n';
    failed = failed || d.error;
  }
  ctx.out = request.out;
  ctx.seed = ctx.resolved.value("seed", std::uint64_t{1});
  ctx.threads = std::max(1u, ctx.resolved.value("threads", 1u));

  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) {
    log << "error: cannot create output directory " << ctx.out.string() << ": " << ec.message()
        << '\n';
    return kExitError;
  }

  int status = kExitOk;
  std::string abort_message;
  if (request.subcommand == "validate") {
    ctx.summary = {{"errors", diagnostics_json(diags, true)},
                   {"warnings", diagnostics_json(diags, false)}};
    if (failed) status = kExitValidation;
  } else if (failed) {
    return kExitValidation;
  } else {
    try {
      if (request.subcommand == "simulate") run_simulate(ctx);
      else if (request.subcommand == "noise-test") run_noise_test(ctx);
      else if (request.subcommand == "control") run_control(ctx);
      else if (request.subcommand == "drift") run_drift(ctx);
      else if (request.subcommand == "ergodic") run_ergodic(ctx);
      else if (request.subcommand == "mdp") run_mdp(ctx);
    } catch (const NumericAbort& e) {
      log << "numeric abort: " << e.what() << '\n';
      abort_message = e.what();
      status = kExitNumeric;
    } catch (const DomainError& e) {
      log << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const IoError& e) {
      log << "error: " << e.what() << '\n';
      return kExitError;
    }
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                          .count();
  json manifest;
  manifest["tool"] = "sglsim";
  manifest["version"] = kVersion;
  manifest["subcommand"] = request.subcommand;
  manifest["seed"] = ctx.seed;
  manifest["threads"] = ctx.threads;
  manifest["config"] = ctx.resolved;
  manifest["endpoint"] = "left";
  manifest["kernel_backend"] = kernels::backend_name(kernels::active().backend);
  manifest["streams"] = {{"engine", "mt19937_64"},
                         {"seeding", "splitmix64(splitmix64(splitmix64(seed) + trajectory) + mode)"},
                         {"trajectory_ids",
                          {{"ensemble_member", "i"},
                           {"long_run", kStreamLongRun},
                           {"drift_states", kStreamStates},
                           {"sampler", kStreamSampler}}}};
  manifest["clipping"] = {{"ergodic", ctx.resolved.at("ergodic").value("clip", 0.0)},
                          {"mdp", ctx.resolved.at("mdp").value("clip", 0.0)}};
  manifest["wall_time_s"] = wall;
  manifest["exit_code"] = status;
  if (!abort_message.empty()) manifest["abort"] = abort_message;
  manifest["summary"] = ctx.summary;
  try {
    write_json(ctx, "summary.json", ctx.summary);
    write_json(ctx, "manifest.json", manifest);
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitError;
  }
  if (request.subcommand == "validate" && diags.empty()) log << "config is valid\n";
  return status;
}

int main(int argc, char** argv) {
  CLI::App app{"Stochastic real Ginzburg-Landau simulator with alpha-stable noise"};
  std::string subcommand;
  std::string config_path;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = "out";
  app.add_option("subcommand", subcommand, "simulate | noise-test | control | drift | "
                                           "ergodic | mdp | validate")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")
                          ->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  RunRequest req;
  req.subcommand = subcommand;
  req.seed = seed;
  req.seed_given = seed_opt->count() > 0;
  req.threads = threads;
  req.threads_given = threads_opt->count() > 0;
  req.out = out;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "error: cannot read config " << config_path << '\n';
      return kExitValidation;
    }
    try {
      req.config = json::parse(is);
    } catch (const json::exception& e) {
      std::cerr << "error: config is not valid JSON: " << e.what() << '\n';
      return kExitValidation;
    }
  }
  return run(req, std::cerr);
}

}  // namespace sgl::cli
