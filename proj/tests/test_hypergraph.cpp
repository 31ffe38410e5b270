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
#include "spsc/hypergraph.hpp"
#include "test_support.hpp"

namespace {

using spsc::ErrorCode;
using spsc::Hypergraph;

Hypergraph from_incidence(Eigen::MatrixXd inc, Eigen::VectorXd weights = {}) {
  Hypergraph h;
  if (weights.size() == 0) weights = Eigen::VectorXd::Ones(inc.rows());
  h.incidence = std::move(inc);
  h.edge_weights = std::move(weights);
  return spsc::compute_weight_and_laplacian(std::move(h));
}

TEST(KnnHypergraph, CollinearPoints) {
  Eigen::MatrixXd x(1, 3);
  x << 0, 1, 10;
  const Hypergraph h = spsc::build_knn_hypergraph(x, 1);
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 1, 0,   // {0, 1}
              1, 1, 0,   // {1, 0}
              0, 1, 1;   // {2, 1}
  EXPECT_EQ(h.incidence, expected);
  EXPECT_EQ(h.edge_weights, Eigen::VectorXd::Ones(3));
}

TEST(KnnHypergraph, CompleteWhenKIsNMinusOne) {
  std::mt19937_64 rng(2);
  const Hypergraph h = spsc::build_knn_hypergraph(oracle::gaussian(4, 6, rng), 5);
  EXPECT_EQ(h.incidence, Eigen::MatrixXd::Ones(6, 6));
}

TEST(KnnHypergraph, TiesGoToLowerIndex) {
  // Vertex 0 sits at distance 1 from vertices 1, 2 and 3.
  Eigen::MatrixXd x(2, 4);
  x << 0, 1, -1, 0,
       0, 0, 0, 1;
  const Hypergraph a = spsc::build_knn_hypergraph(x, 2);
  const Hypergraph b = spsc::build_knn_hypergraph(x, 2);
  EXPECT_EQ(a.incidence.row(0), Eigen::RowVector4d(1, 1, 1, 0));
  EXPECT_EQ(a.incidence, b.incidence);
}

TEST(KnnHypergraph, DuplicatePointsStillKPlusOne) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 6);
  x(0, 5) = 1.0;
  const Hypergraph h = spsc::build_knn_hypergraph(x, 3);
  for (Eigen::Index e = 0; e < h.edges(); ++e) {
    EXPECT_EQ(h.incidence.row(e).sum(), 4.0);
    EXPECT_EQ(h.incidence(e, e), 1.0);
  }
  // Vertex 5 is alone; its neighbours are the three lowest-index duplicates.
  EXPECT_EQ(h.incidence.row(5), (Eigen::RowVectorXd(6) << 1, 1, 1, 0, 0, 1).finished());
}

TEST(KnnHypergraph, EdgeCardinalityIsKPlusOne) {
  std::mt19937_64 rng(4);
  const Hypergraph h = spsc::build_knn_hypergraph(oracle::gaussian(5, 20, rng), 3);
  EXPECT_EQ(h.edges(), 20);
  for (Eigen::Index e = 0; e < h.edges(); ++e) {
    EXPECT_EQ(h.incidence.row(e).sum(), 4.0);
    EXPECT_EQ(h.incidence(e, e), 1.0);
  }
  EXPECT_EQ(h.edge_degrees, Eigen::VectorXd::Constant(20, 4.0));
  EXPECT_EQ(h.vertex_degrees, h.incidence.colwise().sum().transpose());
}

TEST(KnnHypergraph, NeedsMoreSamplesThanK) {
  EXPECT_SPSC_ERROR(spsc::build_knn_hypergraph(Eigen::MatrixXd::Random(2, 3), 3),
                    ErrorCode::kInsufficientSamples);
}

TEST(PairwiseGraph, TwoVertexEdges) {
  std::mt19937_64 rng(6);
  const Hypergraph g = spsc::build_knn_pairwise_graph(oracle::gaussian(3, 8, rng), 2);
  EXPECT_EQ(g.edges(), 16);
  for (Eigen::Index e = 0; e < g.edges(); ++e) EXPECT_EQ(g.incidence.row(e).sum(), 2.0);
}

TEST(WeightAndLaplacian, TwoVertexWorkedExample) {
  const Hypergraph h = from_incidence(Eigen::MatrixXd::Ones(1, 2));
  EXPECT_EQ(h.weight, Eigen::MatrixXd::Constant(2, 2, 0.5));
  Eigen::MatrixXd l(2, 2);
  l << 0.5, -0.5, -0.5, 0.5;
  EXPECT_EQ(h.laplacian, l);
  EXPECT_EQ(h.edge_degrees(0), 2.0);
  EXPECT_EQ(h.vertex_degrees, Eigen::VectorXd::Ones(2));
}

TEST(WeightAndLaplacian, DisjointSingletons) {
  const Hypergraph h = from_incidence(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(h.weight, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(h.laplacian, Eigen::MatrixXd::Zero(2, 2));
}

TEST(WeightAndLaplacian, IsolatedVertexRejected) {
  Eigen::MatrixXd inc(1, 3);
  inc << 1, 1, 0;
  EXPECT_SPSC_ERROR(from_incidence(inc), ErrorCode::kDegenerateVertex);
}

TEST(WeightAndLaplacian, MatchesDefinition) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd inc = oracle::random_incidence(2 + trial % 5, 3 + trial % 6, rng);
    const Eigen::VectorXd we = oracle::uniform(inc.rows(), 1, rng, 0.1, 3.0);
    Eigen::MatrixXd w;
    Eigen::MatrixXd l;
    oracle::hypergraph_operators(inc, we, w, l);
    const Hypergraph h = from_incidence(inc, we);
    EXPECT_LE((h.weight - w).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((h.laplacian - l).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(WeightAndLaplacian, SymmetricPsdProperties) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const Hypergraph h =
        trial % 2 == 0
            ? from_incidence(oracle::random_incidence(4, 9, rng),
                             oracle::uniform(4, 1, rng, 0.5, 2.0))
            : spsc::build_knn_hypergraph(oracle::gaussian(4, 15, rng), 3);
    EXPECT_LE((h.weight - h.weight.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((h.laplacian - (Eigen::MatrixXd::Identity(h.vertices(), h.vertices()) - h.weight))
                  .cwiseAbs()
                  .maxCoeff(),
              0.0);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd v = oracle::gaussian(h.vertices(), 1, rng);
      EXPECT_GE(v.dot(h.laplacian * v), -1e-8 * v.squaredNorm());
    }
    const Eigen::MatrixXd s = oracle::gaussian(5, h.vertices(), rng);
    EXPECT_GE((s * h.laplacian * s.transpose()).trace(), -1e-8);
  }
}

// W has eigenvalue 1 along D_x^{1/2} 1, so its rows sum to one exactly when
// every vertex degree is the same.
TEST(WeightAndLaplacian, DegreeVectorIsFixed) {
  std::mt19937_64 rng(12);
  const Hypergraph h = from_incidence(oracle::random_incidence(5, 8, rng));
  const Eigen::VectorXd root = h.vertex_degrees.cwiseSqrt();
  EXPECT_LE((h.weight * root - root).cwiseAbs().maxCoeff(), 1e-12);

  Eigen::MatrixXd regular(3, 3);  // every vertex on exactly two edges
  regular << 1, 1, 0, 0, 1, 1, 1, 0, 1;
  const Hypergraph r = from_incidence(regular);
  EXPECT_LE((r.weight.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-8);
}

}  // namespace
