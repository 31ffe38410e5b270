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

#ifndef SPSC_MATRIX_IO_HPP
#define SPSC_MATRIX_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spsc {

// An m x n dataset: rows are features (pixels), columns are samples.
// Labels are carried along for evaluation only.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::optional<std::vector<int>> labels;

  Eigen::Index features() const { return values.rows(); }
  Eigen::Index samples() const { return values.cols(); }
};

struct NoiseSpec {
  double rho = 0.0;
  std::uint64_t seed = 0;
};

// Result of Gaussian corruption. `noise` holds the injected perturbation
// (rho * g), so corrupted = clean + noise entrywise.
struct Corruption {
  DataMatrix data;
  Eigen::MatrixXd noise;
  double sigma = 0.0;
};

// Labeled synthetic data built from sparse combinations of a random
// unit-column ground-truth dictionary with class-specific supports.
struct SynthBlobs {
  DataMatrix data;
  std::vector<std::size_t> corrupted;  // sorted column indices
  Eigen::MatrixXd noise;               // everything added on top of D * A
  Eigen::MatrixXd dictionary;          // m x r_true ground truth
};

struct SynthSpec {
  std::size_t n_per_class = 10;
  std::size_t classes = 2;
  std::size_t m = 30;
  std::size_t r_true = 8;
  double noise_frac = 0.0;
  std::uint64_t seed = 0;
};

/// Reads a comma-separated, row-major matrix. With `has_labels` the last row
/// is parsed as integer class ids (one per column).
DataMatrix load_matrix_csv(const std::string& path, bool has_labels);

/// Parses CSV text directly; same rules as load_matrix_csv.
DataMatrix parse_matrix_csv(const std::string& text, bool has_labels);

/// Writes `values` with round-trip precision, appending `labels` as a final
/// row when given.
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& values,
                     const std::vector<int>* labels = nullptr);

/// Scales every column to unit l2 norm. Throws kDegenerateSample on an
/// all-zero column.
DataMatrix normalize_columns_unit_l2(const DataMatrix& x);

/// Population standard deviation over all m*n entries.
double population_std(const Eigen::MatrixXd& values);

/// x~ = x + rho * g with g ~ N(0, sigma^2), sigma = population_std(x).
/// rho == 0 returns the input bit-identically.
Corruption add_gaussian_noise(const DataMatrix& x, const NoiseSpec& spec);

SynthBlobs synth_blobs(const SynthSpec& spec);

}  // namespace spsc

#endif  // SPSC_MATRIX_IO_HPP
