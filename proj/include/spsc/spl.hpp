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

#ifndef SPSC_SPL_HPP
#define SPSC_SPL_HPP

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace spsc {

// Granularity of self-paced selection.
enum class Variant { kSample, kFeature, kElement };

// Self-paced regularizer: linear soft weighting (default) or the hard
// negative-l1 threshold.
enum class SplMode { kSoft, kHard };

std::string to_string(Variant v);
std::string to_string(SplMode mode);
Variant parse_variant(std::string_view text);
SplMode parse_spl_mode(std::string_view text);

inline constexpr double kDefaultPaceStep = 1.2;

// Values are stored at the variant's granularity:
//   kSample   1 x n  (one per column of X)
//   kFeature  m x 1  (one per row of X)
//   kElement  m x n
struct LossField {
  Variant variant = Variant::kElement;
  Eigen::MatrixXd values;
};

struct WeightState {
  Variant variant = Variant::kElement;
  SplMode mode = SplMode::kSoft;
  Eigen::MatrixXd weights;  // same shape convention as LossField
  double lambda = 1.0;
  double mu = kDefaultPaceStep;
};

/// Squared reconstruction errors of X ~ B S aggregated per variant.
LossField compute_losses(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& s, Variant variant);

/// v = 1 - l / lambda for l < lambda, else 0.
WeightState soft_weight_update(const LossField& losses, double lambda,
                               double mu = kDefaultPaceStep);

/// v = 1 for l < lambda, else 0.
WeightState hard_weight_update(const LossField& losses, double lambda,
                               double mu = kDefaultPaceStep);

/// Dispatches on `mode`.
WeightState weight_update(const LossField& losses, double lambda, SplMode mode,
                          double mu = kDefaultPaceStep);

/// f(v; lambda): lambda * (0.5 |v|^2 - |v|_1) for soft, -lambda * |v|_1 for
/// hard. Summed over the stored weights (not the broadcast matrix).
double spl_penalty(const WeightState& state);

/// Pace that puts ceil(fraction * N) loss values strictly below it. Ties at
/// the cut move the threshold up to the next distinct value; when nothing
/// lies above the cut every value is selected.
double init_lambda(const LossField& losses, double select_fraction);

/// lambda <- lambda * mu. Throws kInvalidPace when mu <= 1.
WeightState advance_pace(WeightState state);

/// Broadcasts the stored weights to the m x n element weights.
Eigen::MatrixXd effective_weight_matrix(const WeightState& state, Eigen::Index m,
                                        Eigen::Index n);

/// All-ones state of the right shape (everything selected).
WeightState full_selection(Variant variant, Eigen::Index m, Eigen::Index n,
                           double lambda, double mu = kDefaultPaceStep,
                           SplMode mode = SplMode::kSoft);

}  // namespace spsc

#endif  // SPSC_SPL_HPP
