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

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spsc/spl.hpp"
#include "test_support.hpp"

namespace {

using spsc::ErrorCode;
using spsc::LossField;
using spsc::SplMode;
using spsc::Variant;
using spsc::WeightState;

LossField row(std::initializer_list<double> values) {
  LossField f{Variant::kSample, Eigen::MatrixXd(1, static_cast<Eigen::Index>(values.size()))};
  Eigen::Index k = 0;
  for (double v : values) f.values(0, k++) = v;
  return f;
}

TEST(ComputeLosses, PerfectReconstructionIsZero) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd b = oracle::gaussian(4, 3, rng);
  const Eigen::MatrixXd s = oracle::gaussian(3, 5, rng);
  for (auto v : {Variant::kSample, Variant::kFeature, Variant::kElement}) {
    EXPECT_LE(spsc::compute_losses(b * s, b, s, v).values.maxCoeff(), 1e-24);
  }
}

TEST(ComputeLosses, ScalarElement) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Constant(1, 1, 0.5);
  const Eigen::MatrixXd s = Eigen::MatrixXd::Ones(1, 1);
  EXPECT_DOUBLE_EQ(spsc::compute_losses(x, b, s, Variant::kElement).values(0, 0), 2.25);
}

TEST(ComputeLosses, AggregatesMatchElementSums) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = oracle::gaussian(4, 5, rng);
  const Eigen::MatrixXd b = oracle::gaussian(4, 2, rng);
  const Eigen::MatrixXd s = oracle::gaussian(2, 5, rng);
  const Eigen::MatrixXd e = spsc::compute_losses(x, b, s, Variant::kElement).values;
  const Eigen::MatrixXd by_sample = spsc::compute_losses(x, b, s, Variant::kSample).values;
  const Eigen::MatrixXd by_feature = spsc::compute_losses(x, b, s, Variant::kFeature).values;
  ASSERT_EQ(by_sample.rows(), 1);
  ASSERT_EQ(by_sample.cols(), 5);
  ASSERT_EQ(by_feature.rows(), 4);
  ASSERT_EQ(by_feature.cols(), 1);
  for (Eigen::Index i = 0; i < 5; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < 4; ++j) sum += e(j, i);
    EXPECT_NEAR(by_sample(0, i), sum, 1e-12);
  }
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(by_feature(j, 0), e.row(j).sum(), 1e-12);
}

TEST(ComputeLosses, ShapeMismatch) {
  EXPECT_SPSC_ERROR(spsc::compute_losses(Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Zero(3, 2),
                                         Eigen::MatrixXd::Zero(3, 4), Variant::kSample),
                    ErrorCode::kShape);
}

TEST(SoftWeights, Examples) {
  EXPECT_DOUBLE_EQ(spsc::soft_weight_update(row({1.0}), 2.0).weights(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(spsc::soft_weight_update(row({0.0}), 2.0).weights(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(spsc::soft_weight_update(row({2.0}), 2.0).weights(0, 0), 0.0);
  const WeightState w = spsc::soft_weight_update(row({0.1, 0.5, 3.0}), 1.0);
  EXPECT_NEAR(w.weights(0, 0), 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(w.weights(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(w.weights(0, 2), 0.0);
}

TEST(SoftWeights, MatchesGridSearchOfJointObjective) {
  // Grid over [0,1]^3 at step 1e-2 around the coarse optimum, then 1e-4
  // per coordinate (the objective separates).
  const LossField l = row({0.1, 0.5, 3.0});
  const WeightState w = spsc::soft_weight_update(l, 1.0);
  for (Eigen::Index k = 0; k < 3; ++k) {
    EXPECT_NEAR(w.weights(0, k), oracle::soft_weight_grid(l.values(0, k), 1.0, 10000), 1e-4);
  }
}

TEST(SoftWeights, BeatsEveryGridPoint) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> loss(0.0, 3.0);
  std::uniform_real_distribution<double> pace(0.01, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const double l = loss(rng);
    const double lambda = pace(rng);
    const double v = spsc::soft_weight_update(row({l}), lambda).weights(0, 0);
    const double fv = v * l + lambda * (0.5 * v * v - v);
    for (int k = 0; k <= 10000; k += 7) {
      const double g = k * 1e-4;
      ASSERT_LE(fv, g * l + lambda * (0.5 * g * g - g) + 1e-8);
    }
  }
}

TEST(SoftWeights, RejectsNonPositivePace) {
  EXPECT_SPSC_ERROR(spsc::soft_weight_update(row({1.0}), 0.0), ErrorCode::kInvalidPace);
  EXPECT_SPSC_ERROR(spsc::hard_weight_update(row({1.0}), -1.0), ErrorCode::kInvalidPace);
}

TEST(SoftWeights, MonotoneInPaceAndLoss) {
  std::mt19937_64 rng(4);
  LossField l{Variant::kElement, oracle::uniform(6, 7, rng, 0.0, 2.0)};
  const WeightState a = spsc::soft_weight_update(l, 0.8);
  const WeightState b = spsc::soft_weight_update(l, 0.8 * 1.2);
  EXPECT_TRUE((b.weights.array() >= a.weights.array()).all());
  for (Eigen::Index p = 0; p < l.values.size(); ++p) {
    for (Eigen::Index q = 0; q < l.values.size(); ++q) {
      if (l.values(p) <= l.values(q)) EXPECT_GE(a.weights(p), a.weights(q));
    }
  }
  EXPECT_TRUE((a.weights.array() >= 0.0).all() && (a.weights.array() <= 1.0).all());
}

TEST(SoftWeights, LargePaceSelectsEverything) {
  std::mt19937_64 rng(5);
  LossField l{Variant::kElement, oracle::uniform(3, 4, rng, 0.0, 5.0)};
  const WeightState w = spsc::soft_weight_update(l, 1e10 * l.values.maxCoeff());
  EXPECT_GE(w.weights.minCoeff(), 1.0 - 1e-9);
}

TEST(HardWeights, Examples) {
  EXPECT_EQ(spsc::hard_weight_update(row({0.5}), 1.0).weights(0, 0), 1.0);
  EXPECT_EQ(spsc::hard_weight_update(row({1.0}), 1.0).weights(0, 0), 0.0);
  const WeightState w = spsc::hard_weight_update(row({0.1, 0.9, 1.1}), 1.0);
  EXPECT_EQ(w.weights, (Eigen::MatrixXd(1, 3) << 1, 1, 0).finished());
}

TEST(HardWeights, MatchesEightCaseEnumeration) {
  const LossField l = row({0.1, 0.9, 1.1});
  const double lambda = 1.0;
  double best = 1e300;
  Eigen::RowVector3d best_v;
  for (int mask = 0; mask < 8; ++mask) {
    Eigen::RowVector3d v;
    for (int k = 0; k < 3; ++k) v(k) = (mask >> k) & 1;
    const double f = (v.array() * l.values.row(0).array()).sum() - lambda * v.sum();
    if (f < best) {
      best = f;
      best_v = v;
    }
  }
  EXPECT_EQ(spsc::hard_weight_update(l, lambda).weights.row(0), best_v);
}

TEST(WeightUpdate, DispatchesOnMode) {
  const LossField l = row({0.3, 0.7});
  EXPECT_EQ(spsc::weight_update(l, 1.0, SplMode::kSoft).weights,
            spsc::soft_weight_update(l, 1.0).weights);
  EXPECT_EQ(spsc::weight_update(l, 1.0, SplMode::kHard).weights,
            spsc::hard_weight_update(l, 1.0).weights);
  EXPECT_EQ(spsc::weight_update(l, 1.0, SplMode::kHard).mode, SplMode::kHard);
}

TEST(SplPenalty, Examples) {
  WeightState s{Variant::kSample, SplMode::kSoft, Eigen::MatrixXd::Zero(1, 3), 1.0, 1.2};
  EXPECT_EQ(spsc::spl_penalty(s), 0.0);
  s.weights = Eigen::MatrixXd::Ones(1, 1);
  s.lambda = 2.0;
  EXPECT_DOUBLE_EQ(spsc::spl_penalty(s), -1.0);
  s.weights = Eigen::MatrixXd::Constant(1, 2, 0.5);
  s.lambda = 1.0;
  EXPECT_DOUBLE_EQ(spsc::spl_penalty(s), -0.75);
  s.mode = SplMode::kHard;
  EXPECT_DOUBLE_EQ(spsc::spl_penalty(s), -1.0);
}

TEST(SplPenalty, NonPositiveOnUnitBox) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    WeightState s{Variant::kElement, t % 2 ? SplMode::kHard : SplMode::kSoft,
                  oracle::uniform(3, 3, rng, 0.0, 1.0), 0.1 + t, 1.2};
    EXPECT_LE(spsc::spl_penalty(s), 0.0);
  }
}

TEST(InitLambda, Examples) {
  const double l = spsc::init_lambda(row({1, 2, 3, 4}), 0.5);
  EXPECT_DOUBLE_EQ(l, 2.5);
  EXPECT_GT(spsc::init_lambda(row({5}), 1.0), 5.0);
  const double tied = spsc::init_lambda(row({1, 1, 1, 1}), 0.5);
  EXPECT_GT(tied, 1.0);
  EXPECT_EQ((spsc::soft_weight_update(row({1, 1, 1, 1}), tied).weights.array() > 0).count(), 4);
}

TEST(InitLambda, SelectsRequestedCount) {
  std::mt19937_64 rng(7);
  for (double fraction : {0.1, 0.25, 0.5, 0.9, 1.0}) {
    LossField l{Variant::kElement, oracle::uniform(5, 8, rng, 0.0, 1.0)};
    const double lambda = spsc::init_lambda(l, fraction);
    const auto expected = static_cast<Eigen::Index>(std::ceil(fraction * 40 - 1e-12));
    EXPECT_EQ((l.values.array() < lambda).count(), expected) << fraction;
  }
}

TEST(InitLambda, Errors) {
  EXPECT_SPSC_ERROR(spsc::init_lambda(LossField{Variant::kSample, Eigen::MatrixXd(1, 0)}, 0.5),
                    ErrorCode::kEmptyInput);
  EXPECT_SPSC_ERROR(spsc::init_lambda(row({1, 2}), 0.0), ErrorCode::kInvalidConfig);
  EXPECT_SPSC_ERROR(spsc::init_lambda(row({1, 2}), 1.5), ErrorCode::kInvalidConfig);
}

TEST(AdvancePace, Geometric) {
  WeightState s{Variant::kSample, SplMode::kSoft, Eigen::MatrixXd::Ones(1, 2), 1.0, 1.2};
  EXPECT_DOUBLE_EQ(spsc::advance_pace(s).lambda, 1.2);
  EXPECT_EQ(spsc::advance_pace(s).weights, s.weights);
  s.lambda = 2.0;
  s.mu = 2.0;
  EXPECT_DOUBLE_EQ(spsc::advance_pace(spsc::advance_pace(spsc::advance_pace(s))).lambda, 16.0);
  s.mu = 0.9;
  EXPECT_SPSC_ERROR(spsc::advance_pace(s), ErrorCode::kInvalidPace);
}

TEST(EffectiveWeights, Broadcast) {
  WeightState sample{Variant::kSample, SplMode::kSoft, (Eigen::MatrixXd(1, 3) << 0.1, 0.5, 1).finished(), 1, 1.2};
  const Eigen::MatrixXd es = spsc::effective_weight_matrix(sample, 2, 3);
  for (Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(es.row(j), sample.weights.row(0));

  WeightState feature{Variant::kFeature, SplMode::kSoft, (Eigen::MatrixXd(2, 1) << 0.2, 0.7).finished(), 1, 1.2};
  const Eigen::MatrixXd ef = spsc::effective_weight_matrix(feature, 2, 3);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(ef.col(i), feature.weights.col(0));

  WeightState element{Variant::kElement, SplMode::kSoft, Eigen::MatrixXd::Constant(2, 3, 0.3), 1, 1.2};
  EXPECT_EQ(spsc::effective_weight_matrix(element, 2, 3), element.weights);
  EXPECT_SPSC_ERROR(spsc::effective_weight_matrix(element, 3, 3), ErrorCode::kShape);
}

TEST(FullSelection, ShapesAndOnes) {
  const WeightState s = spsc::full_selection(Variant::kSample, 4, 6, 2.0);
  EXPECT_EQ(s.weights, Eigen::MatrixXd::Ones(1, 6));
  EXPECT_EQ(spsc::full_selection(Variant::kFeature, 4, 6, 2.0).weights, Eigen::MatrixXd::Ones(4, 1));
  EXPECT_EQ(spsc::full_selection(Variant::kElement, 4, 6, 2.0).weights, Eigen::MatrixXd::Ones(4, 6));
}

TEST(VariantNames, RoundTrip) {
  for (auto v : {Variant::kSample, Variant::kFeature, Variant::kElement}) {
    EXPECT_EQ(spsc::parse_variant(spsc::to_string(v)), v);
  }
  EXPECT_EQ(spsc::to_string(Variant::kElement), "element");
  EXPECT_EQ(spsc::parse_spl_mode("hard"), SplMode::kHard);
  EXPECT_SPSC_ERROR(spsc::parse_variant("pixel"), ErrorCode::kInvalidConfig);
}

}  // namespace
