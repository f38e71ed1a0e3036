// SPDX-License-Identifier: Apache-2.0
//
// JSON and CSV encodings of fields and trajectories.
//
// Field JSON takes one of two forms:
//   {"coeffs": [[re, im], ...]}                       x_k for k = 1, 2, ...
//   {"sine": [[k, amp], ...], "cosine": [[k, amp], ...]}
// and an optional "m" that pads or truncates the stored cutoff.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgl/gl_dynamics.hpp"
#include "sgl/spectral.hpp"

namespace sgl::io {

using json = nlohmann::ordered_json;

// Cutoff m_default is used when the object carries no "m".
SpectralField field_from_json(const json& j, std::size_t m_default);
json field_to_json(const SpectralField& x);

// Round-trip exact decimal rendering (%.17g).
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
  std::size_t width_;
};

// Columns t, norm_h, norm_v, re_1, im_1, ..., re_m, im_m.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace sgl::io
