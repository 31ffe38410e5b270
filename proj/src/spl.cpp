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

#include "spsc/spl.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spsc/error.hpp"

namespace spsc {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kSample: return "sample";
    case Variant::kFeature: return "feature";
    case Variant::kElement: return "element";
  }
  return "element";
}

std::string to_string(SplMode mode) {
  return mode == SplMode::kHard ? "hard" : "soft";
}

Variant parse_variant(std::string_view text) {
  if (text == "sample" || text == "s") return Variant::kSample;
  if (text == "feature" || text == "f") return Variant::kFeature;
  if (text == "element" || text == "e") return Variant::kElement;
  throw Error(ErrorCode::kInvalidConfig, "unknown variant '" + std::string(text) + "'");
}

SplMode parse_spl_mode(std::string_view text) {
  if (text == "soft") return SplMode::kSoft;
  if (text == "hard") return SplMode::kHard;
  throw Error(ErrorCode::kInvalidConfig, "unknown spl mode '" + std::string(text) + "'");
}

LossField compute_losses(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& s, Variant variant) {
  if (b.rows() != x.rows() || s.cols() != x.cols() || b.cols() != s.rows()) {
    throw Error(ErrorCode::kShape, "compute_losses: X, B, S shapes disagree");
  }
  const Eigen::MatrixXd sq = (x - b * s).array().square().matrix();
  LossField out;
  out.variant = variant;
  switch (variant) {
    case Variant::kSample: out.values = sq.colwise().sum(); break;
    case Variant::kFeature: out.values = sq.rowwise().sum(); break;
    case Variant::kElement: out.values = sq; break;
  }
  return out;
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidPace, "pace lambda must be a positive finite value");
  }
}

}  // namespace

WeightState soft_weight_update(const LossField& losses, double lambda, double mu) {
  check_lambda(lambda);
  WeightState out{losses.variant, SplMode::kSoft, {}, lambda, mu};
  out.weights = losses.values.unaryExpr(
      [lambda](double l) { return l < lambda ? 1.0 - l / lambda : 0.0; });
  return out;
}

WeightState hard_weight_update(const LossField& losses, double lambda, double mu) {
  check_lambda(lambda);
  WeightState out{losses.variant, SplMode::kHard, {}, lambda, mu};
  out.weights = losses.values.unaryExpr([lambda](double l) { return l < lambda ? 1.0 : 0.0; });
  return out;
}

WeightState weight_update(const LossField& losses, double lambda, SplMode mode, double mu) {
  return mode == SplMode::kHard ? hard_weight_update(losses, lambda, mu)
                                : soft_weight_update(losses, lambda, mu);
}

double spl_penalty(const WeightState& state) {
  const auto& v = state.weights.array();
  if (state.mode == SplMode::kHard) return -state.lambda * v.sum();
  return state.lambda * (0.5 * v.square().sum() - v.sum());
}

double init_lambda(const LossField& losses, double select_fraction) {
  if (!(select_fraction > 0.0 && select_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "select fraction must lie in (0, 1]");
  }
  const auto total = static_cast<std::size_t>(losses.values.size());
  if (total == 0) throw Error(ErrorCode::kEmptyInput, "no loss values");

  std::vector<double> sorted(losses.values.data(), losses.values.data() + total);
  std::sort(sorted.begin(), sorted.end());
  auto count = static_cast<std::size_t>(
      std::ceil(select_fraction * static_cast<double>(total) - 1e-12));
  count = std::clamp<std::size_t>(count, 1, total);

  // The c-th smallest is sorted[count - 1]; the first strictly larger value
  // bounds the threshold from above.
  const double cut = sorted[count - 1];
  const auto above = std::upper_bound(sorted.begin(), sorted.end(), cut);
  if (above == sorted.end()) {
    constexpr double kEpsilon = 1e-12;
    return sorted.back() * 1.001 + kEpsilon;
  }
  return 0.5 * (cut + *above);
}

WeightState advance_pace(WeightState state) {
  if (!(state.mu > 1.0)) throw Error(ErrorCode::kInvalidPace, "pace step mu must exceed 1");
  state.lambda *= state.mu;
  return state;
}

Eigen::MatrixXd effective_weight_matrix(const WeightState& state, Eigen::Index m,
                                        Eigen::Index n) {
  const auto& w = state.weights;
  switch (state.variant) {
    case Variant::kSample:
      if (w.rows() != 1 || w.cols() != n) break;
      return w.replicate(m, 1);
    case Variant::kFeature:
      if (w.rows() != m || w.cols() != 1) break;
      return w.replicate(1, n);
    case Variant::kElement:
      if (w.rows() != m || w.cols() != n) break;
      return w;
  }
  throw Error(ErrorCode::kShape, "weight shape does not match variant " +
                                     to_string(state.variant));
}

WeightState full_selection(Variant variant, Eigen::Index m, Eigen::Index n, double lambda,
                           double mu, SplMode mode) {
  WeightState out{variant, mode, {}, lambda, mu};
  switch (variant) {
    case Variant::kSample: out.weights = Eigen::MatrixXd::Ones(1, n); break;
    case Variant::kFeature: out.weights = Eigen::MatrixXd::Ones(m, 1); break;
    case Variant::kElement: out.weights = Eigen::MatrixXd::Ones(m, n); break;
  }
  return out;
}

}  // namespace spsc
