// SPDX-License-Identifier: Apache-2.0

#include "sgl/io.hpp"

#include <cstdio>

namespace sgl::io {

SpectralField field_from_json(const json& j, std::size_t m_default) {
  if (!j.is_object()) throw DomainError("field: expected a JSON object");
  const std::size_t m = j.value("m", m_default);
  if (m == 0) throw DomainError("field: m must be >= 1");
  if (j.contains("coeffs")) {
    std::vector<std::complex<double>> c;
    for (const auto& pair : j.at("coeffs")) {
      if (!pair.is_array() || pair.size() != 2)
        throw DomainError("field: coeffs entries must be [re, im]");
      c.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    if (c.size() > m) throw DomainError("field: more coefficients than the cutoff m");
    if (c.empty()) return SpectralField(m);
    return with_cutoff(SpectralField(std::move(c)), m);
  }
  SpectralField x(m);
  for (const char* kind : {"sine", "cosine"}) {
    if (!j.contains(kind)) continue;
    for (const auto& pair : j.at(kind)) {
      if (!pair.is_array() || pair.size() != 2)
        throw DomainError(std::string("field: ") + kind + " entries must be [k, amplitude]");
      const auto k = pair[0].get<long>();
      if (k < 1 || static_cast<std::size_t>(k) > m)
        throw DomainError("field: mode index outside 1..m");
      const double amp = pair[1].get<double>();
      x += kind[0] == 's' ? SpectralField::sine(m, static_cast<std::size_t>(k), amp)
                          : SpectralField::cosine(m, static_cast<std::size_t>(k), amp);
    }
  }
  return x;
}

json field_to_json(const SpectralField& x) {
  json coeffs = json::array();
  for (const auto& c : x.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"m", x.cutoff()}, {"coeffs", std::move(coeffs)}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw DomainError("csv: row width differs from header");
  for (std::size_t i = 0; i < values.size(); ++i)
    os_ << (i ? "," : "") << format_double(values[i]);
  os_ << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t m = traj.size() ? traj.states[0].cutoff() : 0;
  std::vector<std::string> header{"t", "norm_h", "norm_v"};
  for (std::size_t k = 1; k <= m; ++k) {
    header.push_back("re_" + std::to_string(k));
    header.push_back("im_" + std::to_string(k));
  }
  CsvWriter csv(os, header);
  std::vector<double> row;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& x = traj.states[i];
    row.assign({traj.times[i], norm_h(x), norm_v(x)});
    for (const auto& c : x.coeffs()) {
      row.push_back(c.real());
      row.push_back(c.imag());
    }
    csv.row(row);
  }
}

}  // namespace sgl::io
