/* Copyright 2026 The darkpath Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "darkpath/evolution.hpp"
#include "darkpath/gates.hpp"
#include "darkpath/robustness.hpp"
#include "darkpath/two_qudit.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace darkpath::io {

using nlohmann::json;

/// Parses JSON text; syntax errors become UsageError anchored at source:line:column.
inline json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw UsageError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) { return parse_json(read_file(path), path); }

// Schema access with readable errors.
template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? field<T>(j, key) : fallback;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw UsageError("expected a complex number as [re, im] or a real number, got " + j.dump());
}

/// Row-major matrix of [re, im] pairs.
inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  const json& rows = j.is_object() && j.contains("matrix") ? j.at("matrix") : j;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array()) throw UsageError("matrix: expected an array of rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows[0].size());
  Matrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != n_cols) {
      throw UsageError("matrix: row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index k = 0; k < n_cols; ++k) m(i, k) = complex_from_json(rows[i][k]);
  }
  return m;
}

inline json to_json(const LoopParams& loop) {
  return {{"thetas", loop.angles.thetas}, {"phis", loop.angles.phis}, {"pulse_phases", loop.pulse_phases},
          {"gammas", loop.gammas},        {"eta", loop.eta},          {"tau", loop.tau}};
}

inline LoopParams loop_from_json(const json& j) {
  LoopParams loop;
  loop.angles.thetas = field<std::vector<double>>(j, "thetas");
  loop.angles.phis = field<std::vector<double>>(j, "phis");
  loop.gammas = field<std::vector<double>>(j, "gammas");
  loop.pulse_phases = field_or(j, "pulse_phases", std::vector<double>(loop.gammas.size(), 0.0));
  loop.eta = field_or(j, "eta", 0.0);
  loop.tau = field_or(j, "tau", 1.0);
  loop.validate();
  return loop;
}

inline json to_json(const GateProgram& p) {
  json loops = json::array();
  for (const auto& l : p.loops) loops.push_back(to_json(l));
  return {{"d", p.d}, {"loops", loops}, {"label", p.label}};
}

inline GateProgram program_from_json(const json& j) {
  GateProgram p;
  p.d = field<int>(j, "d");
  const auto loops = field<json>(j, "loops");
  if (!loops.is_array()) throw UsageError("field 'loops' must be an array");
  for (const auto& l : loops) p.loops.push_back(loop_from_json(l));
  p.label = field_or(j, "label", std::string());
  p.validate();
  return p;
}

inline json to_json(const LaserConfig& c) {
  json omegas = json::array();
  for (const auto& w : c.omegas) omegas.push_back(complex_to_json(w));
  return {{"omega0", complex_to_json(c.omega0)}, {"omegas", omegas}, {"omega_a", complex_to_json(c.omega_a)},
          {"phases", c.phases},  {"phase_a", c.phase_a}, {"eta_L", c.eta_L}, {"nu", c.nu}, {"Delta", c.Delta}};
}

inline LaserConfig laser_config_from_json(const json& j) {
  LaserConfig c;
  c.omega0 = complex_from_json(field<json>(j, "omega0"));
  for (const auto& w : field<json>(j, "omegas")) c.omegas.push_back(complex_from_json(w));
  c.omega_a = complex_from_json(field<json>(j, "omega_a"));
  c.phases = field<std::vector<double>>(j, "phases");
  c.phase_a = field_or(j, "phase_a", 0.0);
  c.eta_L = field<double>(j, "eta_L");
  c.nu = field<double>(j, "nu");
  c.Delta = field<double>(j, "Delta");
  return c;
}

inline const char* kSweepCsvHeader = "gate,eta,delta,mean_fidelity,stderr,samples";

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << kSweepCsvHeader << '\n';
  const auto old = os.precision(17);
  for (const auto& row : r.rows) {
    os << row.gate << ',' << row.eta << ',' << row.delta << ',' << row.mean_fidelity << ',' << row.stderr_ << ','
       << row.samples << '\n';
  }
  os.precision(old);
}

inline json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = {{"gate", row.gate},      {"eta", row.eta},         {"delta", row.delta},
               {"mean_fidelity", row.mean_fidelity}, {"stderr", row.stderr_}, {"samples", row.samples},
               {"failures", row.failures}};
    if (!row.error.empty()) jr["error"] = row.error;
    rows.push_back(std::move(jr));
  }
  return {{"rows", rows}};
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

}  // namespace detail

inline SweepResult read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepCsvHeader) throw UsageError("sweep CSV: unexpected header");
  SweepResult r;
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 6) throw UsageError("sweep CSV line " + std::to_string(n) + ": expected 6 columns");
    SweepRow row;
    row.gate = cells[0];
    row.eta = detail::to_double(cells[1], n);
    row.delta = detail::to_double(cells[2], n);
    row.mean_fidelity = detail::to_double(cells[3], n);
    row.stderr_ = detail::to_double(cells[4], n);
    row.samples = static_cast<int>(detail::to_double(cells[5], n));
    r.rows.push_back(std::move(row));
  }
  return r;
}

inline SweepResult sweep_from_json(const json& j) {
  SweepResult r;
  for (const auto& jr : field<json>(j, "rows")) {
    SweepRow row;
    row.gate = field<std::string>(jr, "gate");
    row.eta = field<double>(jr, "eta");
    row.delta = field<double>(jr, "delta");
    row.mean_fidelity = jr.at("mean_fidelity").is_null() ? NAN : field<double>(jr, "mean_fidelity");
    row.stderr_ = jr.at("stderr").is_null() ? NAN : field<double>(jr, "stderr");
    row.samples = field<int>(jr, "samples");
    row.failures = field_or(jr, "failures", 0);
    row.error = field_or(jr, "error", std::string());
    r.rows.push_back(std::move(row));
  }
  return r;
}

/// Numeric table from a trajectory CSV: header names and one row per sample.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw UsageError("CSV: no column '" + name + "'");
  }
};

inline CsvTable read_numeric_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw UsageError("CSV: empty input");
  t.header = detail::split(line, ',');
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != t.header.size()) throw UsageError("CSV line " + std::to_string(n) + ": column count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(detail::to_double(c, n));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace darkpath::io
