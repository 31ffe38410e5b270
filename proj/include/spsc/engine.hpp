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

#ifndef SPSC_ENGINE_HPP
#define SPSC_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "spsc/error.hpp"
#include "spsc/hypergraph.hpp"
#include "spsc/solvers.hpp"
#include "spsc/spl.hpp"

namespace spsc {

// How Q evolves after initialization.
enum class QPolicy { kFrozen, kRidge };

std::string to_string(QPolicy policy);
QPolicy parse_q_policy(std::string_view text);

struct SpscConfig {
  Variant variant = Variant::kElement;
  RegularizationConfig reg;
  SplMode spl_mode = SplMode::kSoft;
  double mu = kDefaultPaceStep;
  double select_fraction0 = 0.5;
  int max_outer_iters = 100;
  double tol_objective = 1e-5;
  double tol_weight_saturation = 1e-3;
  std::uint64_t seed = 0;
  int dictionary_size = 128;
  QPolicy q_policy = QPolicy::kRidge;
  // Multiplies the initial pace; 1 keeps the select_fraction0 target.
  double lambda0_scale = 1.0;
  // Plain sparse coding used for initialization.
  int init_max_iters = 30;
  double init_tol = 1e-5;
  // Keep every iteration's weights in FitTrace::weight_snapshots.
  bool keep_weight_snapshots = true;
};

void validate(const SpscConfig& cfg);

struct TraceRecord {
  int iteration = 0;
  double lambda = 0.0;
  ObjectiveTerms terms;  // at the end of the iteration
  double selected_fraction = 0.0;  // share of effective weights > 0
  double mean_weight = 0.0;
  double min_weight = 0.0;
  // Objective (same lambda) entering the iteration and after each sub-step.
  double objective_before = 0.0;
  double objective_after_v = 0.0;
  double objective_after_b = 0.0;
  double objective_after_s = 0.0;
  double objective_after_q = 0.0;
  std::size_t snapshot = kNoSnapshot;

  static constexpr std::size_t kNoSnapshot = std::numeric_limits<std::size_t>::max();
};

struct FitTrace {
  std::vector<TraceRecord> records;
  std::vector<Eigen::MatrixXd> weight_snapshots;
};

struct CodingState {
  Eigen::MatrixXd dictionary;   // B, m x r
  Eigen::MatrixXd codes;        // S, r x n
  Eigen::MatrixXd consistency;  // Q, |E| x r (0 x r without a hypergraph)
  std::vector<double> objectives;  // after seeding, then after each iteration
  int iterations = 0;
};

struct FitResult {
  Eigen::MatrixXd dictionary;
  Eigen::MatrixXd codes;
  Eigen::MatrixXd consistency;
  WeightState weights;
  FitTrace trace;
  CodingState init;
  double lambda0 = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Raised when the objective turns non-finite; carries the partial trace.
class FitAborted : public Error {
 public:
  FitAborted(const std::string& what, FitTrace trace)
      : Error(ErrorCode::kNonFiniteObjective, what), trace_(std::move(trace)) {}
  const FitTrace& trace() const { return trace_; }

 private:
  FitTrace trace_;
};

using IterationObserver = std::function<void(const TraceRecord&, const WeightState&)>;

/// Plain (hypergraph-regularized) sparse coding with every element selected.
/// B is seeded from cfg.dictionary_size distinct data columns with a small
/// Gaussian jitter; Q from a ridge fit to the first codes.
CodingState fit_csc_init(const Eigen::MatrixXd& x, const Hypergraph* graph,
                         const SpscConfig& cfg);

/// Continues all-selected alternation from `state` for exactly `iterations`
/// B/S(/Q) rounds.
CodingState continue_sc(const Eigen::MatrixXd& x, const Hypergraph* graph,
                        const SpscConfig& cfg, CodingState state, int iterations);

/// Self-paced sparse coding. `observer` sees every finished iteration.
FitResult fit_spsc(const Eigen::MatrixXd& x, const Hypergraph* graph, const SpscConfig& cfg,
                   const IterationObserver& observer = {});

}  // namespace spsc

#endif  // SPSC_ENGINE_HPP
