// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven experiment runner behind the sglsim tool.
//
// Randomness: every stream is mt19937_64 seeded from (seed, trajectory,
// mode). Trajectory ids are fixed per experiment (see kStream* below), so a
// run is reproducible from (config, seed) alone, for any thread count.

#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "sgl/io.hpp"

namespace sgl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr std::uint64_t kStreamLongRun = 1ull << 40;
inline constexpr std::uint64_t kStreamStates = 1ull << 41;
inline constexpr std::uint64_t kStreamSampler = 1ull << 42;

inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& subcommands();

// Defaults for every knob; user config is merged over this document.
io::json default_config();
// default_config() with `user` merge-patched on top.
io::json resolve_config(const io::json& user);

struct Diagnostic {
  bool error = true;
  std::string message;
};

// Checks the blocks `subcommand` reads ("validate" checks all of them).
std::vector<Diagnostic> validate_config(const io::json& resolved,
                                        const std::string& subcommand = "validate");

struct RunRequest {
  std::string subcommand;
  io::json config;  // user config (unresolved)
  std::uint64_t seed = 1;
  bool seed_given = false;
  unsigned threads = 1;
  bool threads_given = false;
  std::filesystem::path out = "out";
};

// Runs one subcommand and writes CSVs, summary.json and manifest.json to
// request.out. Returns an exit code; messages go to `log`.
int run(const RunRequest& request, std::ostream& log);

// Command-line front end.
int main(int argc, char** argv);

}  // namespace sgl::cli
