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

#ifndef SPSC_EXPERIMENT_HPP
#define SPSC_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spsc/engine.hpp"
#include "spsc/matrix_io.hpp"

namespace spsc {

// Everything a fit or a sweep needs. JSON keys and CLI flags share the
// kebab-case names listed in to_json().
struct ExperimentConfig {
  // Path to a CSV matrix, or "synth:key=value,..." for generated data
  // (keys: classes, per-class, m, r-true, noise-frac, seed).
  std::string data;
  bool labels = true;
  std::string dataset;  // name used in results rows; defaults to the file stem
  int dictionary_size = 128;
  Variant variant = Variant::kElement;
  SplMode spl_mode = SplMode::kSoft;
  RegularizationConfig reg{1.0, 0.02, 1.0};
  double mu = kDefaultPaceStep;
  double select_fraction0 = 0.5;
  int max_outer_iters = 100;
  double tol_objective = 1e-5;
  double tol_weight_saturation = 1e-3;
  QPolicy q_policy = QPolicy::kRidge;
  std::vector<double> rhos{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int knn = 3;
  int repeats = 30;
  std::uint64_t seed = 0;
  std::string output = "spsc-run";
  std::vector<std::string> methods{"OS", "SC", "LSC-G", "LSC-H", "CSC", "SPSC-E", "SPSC-S", "SPSC-F"};
  bool tune = false;
  bool export_graph = false;
  bool snapshots = true;  // write V_iter_<t>.csv
  bool verbose = false;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Overlays the keys present in `j` on `base`. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Engine configuration for the fit part of an experiment.
SpscConfig engine_config(const ExperimentConfig& cfg);

/// Parses "synth:classes=3,per-class=20,..." (seed defaults to `seed`).
std::optional<SynthSpec> parse_synth_source(const std::string& data, std::uint64_t seed);

// Method names understood by the sweep.
bool is_known_method(const std::string& name);

/// Loads (or generates) data, corrupts at cfg.rhos.front(), normalizes,
/// builds the hypergraph and runs fit_spsc. Writes B.csv, S.csv, Q.csv,
/// trace.csv, config-echo.json, V_iter_<t>.csv and, when noise was present,
/// noise_magnitude.csv into cfg.output. Returns the run directory.
std::string run_fit(const ExperimentConfig& cfg);

/// Noise sweep over cfg.rhos x cfg.methods; writes results.csv in
/// cfg.output (one row per method and rho) and returns its path.
std::string run_sweep(const ExperimentConfig& cfg);

/// Correlation between per-sample noise level and per-sample mean weight for
/// each recorded iteration of a run directory. Writes weight_trace.csv there
/// and returns its path.
std::string run_trace(const std::string& run_dir);

struct WeightTraceRow {
  int iteration = 0;
  double lambda = 0.0;
  std::optional<double> pearson;
  std::optional<double> spearman;
  double mean_weight = 0.0;
};

std::vector<WeightTraceRow> read_weight_trace(const std::string& run_dir);

/// Pearson correlation; empty when either side has zero variance.
std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// Spearman rank correlation (average ranks for ties).
std::optional<double> spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Per-sample mean weight from weights stored at any granularity
/// (1 x n, m x 1 or m x n).
Eigen::VectorXd per_sample_weight(const Eigen::MatrixXd& stored, Eigen::Index samples);

/// Writes the trace as CSV with a header row.
void save_trace_csv(const std::string& path, const FitTrace& trace);

}  // namespace spsc

#endif  // SPSC_EXPERIMENT_HPP
