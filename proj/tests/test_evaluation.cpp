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

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spsc/evaluation.hpp"
#include "test_support.hpp"

namespace {

using spsc::ErrorCode;

std::vector<int> random_labels(std::size_t n, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, classes - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = pick(rng);
  return out;
}

// ---- k-means ----------------------------------------------------------------

TEST(KMeans, SeparatedPairs) {
  Eigen::MatrixXd z(2, 4);
  z << 0, 10, 0, 10,
       0, 10, 0, 10;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = spsc::kmeans(z, 2, seed);
    EXPECT_EQ(r.assignments[0], r.assignments[2]);
    EXPECT_EQ(r.assignments[1], r.assignments[3]);
    EXPECT_NE(r.assignments[0], r.assignments[1]);
  }
}

TEST(KMeans, OneClusterPerPoint) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd z = oracle::gaussian(3, 6, rng);
  const auto r = spsc::kmeans(z, 6, 4);
  std::vector<int> sorted = r.assignments;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  for (Eigen::Index i = 0; i < 6; ++i) {
    EXPECT_EQ((r.centers.col(r.assignments[static_cast<std::size_t>(i)]) - z.col(i)).norm(), 0.0);
  }
}

TEST(KMeans, SingleClusterCenterIsMean) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd z = oracle::gaussian(4, 9, rng);
  const auto r = spsc::kmeans(z, 1, 0);
  EXPECT_TRUE(std::all_of(r.assignments.begin(), r.assignments.end(), [](int a) { return a == 0; }));
  EXPECT_LE((r.centers.col(0) - z.rowwise().mean()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(KMeans, DeterministicAndFixedPoint) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd z = oracle::gaussian(2, 40, rng);
  const auto a = spsc::kmeans(z, 4, 9);
  const auto b = spsc::kmeans(z, 4, 9);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_LE(a.iterations, 300);
  // Every point sits with its nearest center.
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    Eigen::Index best = 0;
    (a.centers.colwise() - z.col(i)).colwise().squaredNorm().minCoeff(&best);
    const double own = (a.centers.col(a.assignments[static_cast<std::size_t>(i)]) - z.col(i)).squaredNorm();
    EXPECT_LE(own, (a.centers.col(best) - z.col(i)).squaredNorm() + 1e-12);
  }
}

TEST(KMeans, InvalidK) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 3);
  EXPECT_SPSC_ERROR(spsc::kmeans(z, 4, 0), ErrorCode::kInvalidConfig);
  EXPECT_SPSC_ERROR(spsc::kmeans(z, 0, 0), ErrorCode::kInvalidConfig);
}

TEST(KMeans, DuplicatePointsKeepClustersNonEmpty) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 6);
  z(0, 5) = 1.0;
  const auto r = spsc::kmeans(z, 3, 1);
  EXPECT_EQ(static_cast<Eigen::Index>(r.assignments.size()), 6);
  EXPECT_TRUE(r.centers.allFinite());
}

// ---- Hungarian --------------------------------------------------------------

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const int rows = 1 + t % 5;
    const int cols = 1 + (t / 5) % 5;
    const Eigen::MatrixXd p = oracle::uniform(rows, cols, rng, 0.0, 10.0).array().round();
    const std::vector<int> assign = spsc::hungarian_max(p);
    ASSERT_EQ(static_cast<int>(assign.size()), rows);
    double got = 0.0;
    std::vector<int> used;
    for (int i = 0; i < rows; ++i) {
      if (assign[static_cast<std::size_t>(i)] >= 0) {
        got += p(i, assign[static_cast<std::size_t>(i)]);
        used.push_back(assign[static_cast<std::size_t>(i)]);
      }
    }
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());

    const int size = std::max(rows, cols);
    std::vector<int> perm(static_cast<std::size_t>(size));
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double v = 0.0;
      for (int i = 0; i < rows; ++i) {
        if (perm[static_cast<std::size_t>(i)] < cols) v += p(i, perm[static_cast<std::size_t>(i)]);
      }
      best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(got, best);
  }
}

// ---- ACC --------------------------------------------------------------------

TEST(Accuracy, Examples) {
  EXPECT_EQ(spsc::clustering_accuracy({0, 1, 2, 1}, {0, 1, 2, 1}), 1.0);
  EXPECT_EQ(spsc::clustering_accuracy({2, 0, 1, 0}, {0, 1, 2, 1}), 1.0);
  EXPECT_EQ(spsc::clustering_accuracy({0, 0, 1, 1}, {0, 1, 1, 1}), 0.75);
}

TEST(Accuracy, Errors) {
  EXPECT_SPSC_ERROR(spsc::clustering_accuracy({0, 1}, {0}), ErrorCode::kShape);
  EXPECT_SPSC_ERROR(spsc::clustering_accuracy({}, {}), ErrorCode::kEmptyInput);
}

TEST(Accuracy, RelabelInvariantAndMatchesOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 12;
    const auto pred = random_labels(n, 1 + t % 5, rng);
    const auto truth = random_labels(n, 1 + (t / 3) % 5, rng);
    const double acc = spsc::clustering_accuracy(pred, truth);
    EXPECT_DOUBLE_EQ(acc, oracle::accuracy_bruteforce(pred, truth));
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
    std::vector<int> relabel(5);
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin(), relabel.end(), rng);
    std::vector<int> mapped(n);
    for (std::size_t i = 0; i < n; ++i) mapped[i] = 10 + relabel[static_cast<std::size_t>(pred[i])];
    EXPECT_DOUBLE_EQ(spsc::clustering_accuracy(mapped, truth), acc);
    EXPECT_DOUBLE_EQ(spsc::clustering_accuracy(truth, pred), acc);
  }
}

// ---- NMI --------------------------------------------------------------------

TEST(Nmi, Examples) {
  EXPECT_NEAR(spsc::nmi({0, 0, 1, 1}, {0, 0, 1, 1}), 1.0, 1e-12);
  EXPECT_NEAR(spsc::nmi({5, 5, 3, 3}, {0, 0, 1, 1}), 1.0, 1e-12);
  EXPECT_EQ(spsc::nmi({0, 0, 0, 0}, {0, 0, 1, 1}), 0.0);
  EXPECT_EQ(spsc::nmi({4, 4, 4}, {1, 1, 1}), 1.0);
  EXPECT_NEAR(spsc::nmi({0, 0, 1, 1}, {0, 1, 0, 1}), 0.0, 1e-12);
}

TEST(Nmi, Errors) {
  EXPECT_SPSC_ERROR(spsc::nmi({0, 1}, {0}), ErrorCode::kShape);
  EXPECT_SPSC_ERROR(spsc::nmi({}, {}), ErrorCode::kEmptyInput);
}

TEST(Nmi, SymmetricBoundedAndMatchesOracle) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 15;
    const auto a = random_labels(n, 1 + t % 4, rng);
    const auto b = random_labels(n, 1 + (t / 4) % 4, rng);
    const double v = spsc::nmi(a, b);
    EXPECT_NEAR(v, spsc::nmi(b, a), 1e-12);
    EXPECT_NEAR(v, oracle::nmi_reference(a, b), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

// ---- repeated evaluation ----------------------------------------------------

Eigen::MatrixXd separated_classes(std::vector<int>& labels, std::mt19937_64& rng) {
  Eigen::MatrixXd z(2, 30);
  labels.assign(30, 0);
  std::normal_distribution<double> jitter(0.0, 0.1);
  for (Eigen::Index i = 0; i < 30; ++i) {
    const int c = static_cast<int>(i % 3);
    labels[static_cast<std::size_t>(i)] = c;
    z(0, i) = 100.0 * c + jitter(rng);
    z(1, i) = (c == 1 ? 100.0 : 0.0) + jitter(rng);
  }
  return z;
}

TEST(EvaluateRepeated, SingleRunMatchesKMeans) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd z = oracle::gaussian(2, 20, rng);
  const auto labels = random_labels(20, 3, rng);
  const auto r = spsc::evaluate_repeated(z, 3, labels, 1, 17);
  const auto km = spsc::kmeans(z, 3, 17);
  ASSERT_EQ(r.per_run.size(), 1u);
  EXPECT_EQ(r.acc, spsc::clustering_accuracy(km.assignments, labels));
  EXPECT_EQ(r.nmi, spsc::nmi(km.assignments, labels));
  EXPECT_EQ(r.assignments, km.assignments);
  EXPECT_EQ(r.acc_std, 0.0);
}

TEST(EvaluateRepeated, MeansAndDeterminism) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd z = oracle::gaussian(2, 25, rng);
  const auto labels = random_labels(25, 3, rng);
  const auto a = spsc::evaluate_repeated(z, 3, labels, 7, 3);
  const auto b = spsc::evaluate_repeated(z, 3, labels, 7, 3);
  ASSERT_EQ(a.per_run.size(), 7u);
  EXPECT_EQ(a.per_run, b.per_run);
  double acc = 0.0, nmi = 0.0, best = 0.0;
  for (std::size_t k = 0; k < a.per_run.size(); ++k) {
    EXPECT_EQ(a.per_run[k].first,
              spsc::clustering_accuracy(spsc::kmeans(z, 3, 3 + k).assignments, labels));
    acc += a.per_run[k].first;
    nmi += a.per_run[k].second;
    best = std::max(best, a.per_run[k].first);
  }
  EXPECT_NEAR(a.acc, acc / 7, 1e-12);
  EXPECT_NEAR(a.nmi, nmi / 7, 1e-12);
  EXPECT_EQ(spsc::clustering_accuracy(a.assignments, labels), best);
}

// Lloyd from data-point centers can still merge two separated classes when
// two initial centers share a class, so only the best run is exact.
TEST(EvaluateRepeated, SeparatedClassesRecoveredByBestRun) {
  std::mt19937_64 rng(9);
  std::vector<int> labels;
  const Eigen::MatrixXd z = separated_classes(labels, rng);
  const auto r = spsc::evaluate_repeated(z, 3, labels, 30, 0);
  EXPECT_EQ(spsc::clustering_accuracy(r.assignments, labels), 1.0);
  int perfect = 0;
  for (const auto& [acc, nmi] : r.per_run) {
    if (acc == 1.0) {
      ++perfect;
      EXPECT_NEAR(nmi, 1.0, 1e-12);
    }
  }
  EXPECT_GE(perfect, 15);
}

TEST(EvaluateRepeated, SeparatedClassesWithOneCenterEachArePerfect) {
  // Seeding one center inside every class gives the truth as the fixed point.
  std::mt19937_64 rng(10);
  std::vector<int> labels;
  const Eigen::MatrixXd z = separated_classes(labels, rng);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto km = spsc::kmeans(z, 3, seed);
    const double acc = spsc::clustering_accuracy(km.assignments, labels);
    std::vector<int> sorted = km.assignments;
    std::sort(sorted.begin(), sorted.end());
    const bool all_used = std::unique(sorted.begin(), sorted.end()) - sorted.begin() == 3;
    if (acc < 1.0) {
      // A merged pair of classes always coexists with a split class.
      EXPECT_TRUE(all_used);
      EXPECT_GE(acc, 0.5);
    }
  }
}

TEST(EvaluateRepeated, Errors) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 3);
  EXPECT_SPSC_ERROR(spsc::evaluate_repeated(z, 2, {0, 1, 0}, 0, 0), ErrorCode::kInvalidConfig);
  EXPECT_SPSC_ERROR(spsc::evaluate_repeated(z, 2, {0, 1}, 3, 0), ErrorCode::kShape);
}

}  // namespace
