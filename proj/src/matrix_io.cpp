// Copyright 2026 The SPSC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spsc/matrix_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "spsc/error.hpp"

namespace spsc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateSample: return "DegenerateSample";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kDegenerateVertex: return "DegenerateVertex";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kInvalidPace: return "InvalidPace";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNumerical: return "NumericalError";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kIo: return "IoError";
  }
  return "UnknownError";
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_real(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) {
    throw Error(ErrorCode::kParse, "empty cell at row " + std::to_string(row) +
                                       ", column " + std::to_string(col));
  }
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kParse, "non-numeric cell '" + cell + "' at row " +
                                       std::to_string(row) + ", column " +
                                       std::to_string(col));
  }
  return value;
}

int parse_label(const std::string& cell, std::size_t col) {
  char* end = nullptr;
  errno = 0;
  const long value = std::strtol(cell.c_str(), &end, 10);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw Error(ErrorCode::kParse, "label '" + cell + "' in column " +
                                       std::to_string(col) +
                                       " is not an integer");
  }
  return static_cast<int>(value);
}

}  // namespace

DataMatrix parse_matrix_csv(const std::string& text, bool has_labels) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_cells(line));
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "empty CSV input");

  const std::size_t cols = rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorCode::kParse,
                  "ragged CSV: row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " cells, expected " +
                      std::to_string(cols));
    }
  }

  const std::size_t value_rows = has_labels ? rows.size() - 1 : rows.size();
  if (value_rows == 0) {
    throw Error(ErrorCode::kEmptyInput, "CSV holds a label row but no data");
  }

  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(value_rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < value_rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_real(rows[i][j], i, j);
    }
  }
  if (has_labels) {
    std::vector<int> labels(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      labels[j] = parse_label(rows.back()[j], j);
    }
    out.labels = std::move(labels);
  }
  return out;
}

DataMatrix load_matrix_csv(const std::string& path, bool has_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix_csv(buffer.str(), has_labels);
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& values,
                     const std::vector<int>* labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  char cell[32];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(cell, sizeof cell, "%.17g", values(i, j));
      if (j > 0) out << ',';
      out << cell;
    }
    out << '\n';
  }
  if (labels != nullptr) {
    for (std::size_t j = 0; j < labels->size(); ++j) {
      if (j > 0) out << ',';
      out << (*labels)[j];
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

DataMatrix normalize_columns_unit_l2(const DataMatrix& x) {
  DataMatrix out = x;
  for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
    const double norm = out.values.col(j).norm();
    if (norm == 0.0) {
      throw Error(ErrorCode::kDegenerateSample,
                  "column " + std::to_string(j) + " is all zeros");
    }
    out.values.col(j) /= norm;
  }
  return out;
}

double population_std(const Eigen::MatrixXd& values) {
  if (values.size() == 0) return 0.0;
  const double mean = values.mean();
  return std::sqrt((values.array() - mean).square().sum() /
                   static_cast<double>(values.size()));
}

Corruption add_gaussian_noise(const DataMatrix& x, const NoiseSpec& spec) {
  if (!(spec.rho >= 0.0) || !std::isfinite(spec.rho)) {
    throw Error(ErrorCode::kInvalidConfig, "corruption ratio must be >= 0");
  }
  Corruption out;
  out.data = x;
  out.sigma = population_std(x.values);
  out.noise = Eigen::MatrixXd::Zero(x.values.rows(), x.values.cols());
  if (spec.rho == 0.0) return out;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index j = 0; j < out.noise.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.noise.rows(); ++i) {
      out.noise(i, j) = spec.rho * out.sigma * gauss(rng);
    }
  }
  out.data.values += out.noise;
  return out;
}

SynthBlobs synth_blobs(const SynthSpec& spec) {
  if (spec.n_per_class == 0 || spec.classes == 0 || spec.m == 0 ||
      spec.r_true == 0) {
    throw Error(ErrorCode::kInvalidConfig, "synth_blobs counts must be >= 1");
  }
  if (!(spec.noise_frac >= 0.0 && spec.noise_frac <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "noise_frac must lie in [0, 1]");
  }
  const auto m = static_cast<Eigen::Index>(spec.m);
  const auto r = static_cast<Eigen::Index>(spec.r_true);
  const std::size_t n = spec.n_per_class * spec.classes;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);

  SynthBlobs out;
  out.dictionary.resize(m, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) out.dictionary(i, k) = gauss(rng);
    out.dictionary.col(k).normalize();
  }

  // Each class draws a small support of atoms and a prototype coefficient
  // vector; members jitter around the prototype.
  const std::size_t support = std::min<std::size_t>(spec.r_true, 3);
  std::vector<Eigen::VectorXd> prototypes(spec.classes);
  std::vector<std::vector<Eigen::Index>> supports(spec.classes);
  std::vector<Eigen::Index> atoms(static_cast<std::size_t>(r));
  std::iota(atoms.begin(), atoms.end(), Eigen::Index{0});
  for (std::size_t c = 0; c < spec.classes; ++c) {
    std::shuffle(atoms.begin(), atoms.end(), rng);
    supports[c].assign(atoms.begin(),
                       atoms.begin() + static_cast<std::ptrdiff_t>(support));
    prototypes[c] = Eigen::VectorXd::Zero(r);
    for (Eigen::Index k : supports[c]) {
      const double sign = (rng() & 1U) ? 1.0 : -1.0;
      prototypes[c](k) = sign * magnitude(rng);
    }
  }

  out.data.values.resize(m, static_cast<Eigen::Index>(n));
  out.noise.resize(m, static_cast<Eigen::Index>(n));
  std::vector<int> labels(n);
  constexpr double kJitter = 0.1;
  constexpr double kBackground = 0.01;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t t = 0; t < spec.n_per_class; ++t) {
      const std::size_t j = c * spec.n_per_class + t;
      Eigen::VectorXd coeff = prototypes[c];
      for (Eigen::Index k : supports[c]) coeff(k) += kJitter * gauss(rng);
      Eigen::VectorXd background(m);
      for (Eigen::Index i = 0; i < m; ++i) background(i) = kBackground * gauss(rng);
      const auto col = static_cast<Eigen::Index>(j);
      out.data.values.col(col) = out.dictionary * coeff + background;
      out.noise.col(col) = background;
      labels[j] = static_cast<int>(c);
    }
  }

  const auto corrupted_count =
      static_cast<std::size_t>(std::floor(spec.noise_frac * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  out.corrupted.assign(order.begin(),
                       order.begin() + static_cast<std::ptrdiff_t>(corrupted_count));
  std::sort(out.corrupted.begin(), out.corrupted.end());

  // Heavy corruption: isotropic noise with about twice the column's energy.
  constexpr double kHeavy = 2.0;
  for (std::size_t j : out.corrupted) {
    const auto col = static_cast<Eigen::Index>(j);
    const double scale =
        kHeavy * out.data.values.col(col).norm() / std::sqrt(static_cast<double>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double e = scale * gauss(rng);
      out.data.values(i, col) += e;
      out.noise(i, col) += e;
    }
  }
  out.data.labels = std::move(labels);
  return out;
}

}  // namespace spsc
