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

#include "spsc/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "spsc/error.hpp"

namespace spsc {

std::vector<std::vector<Eigen::Index>> knn_indices(const Eigen::MatrixXd& x, int k) {
  const Eigen::Index n = x.cols();
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (n <= k) {
    throw Error(ErrorCode::kInsufficientSamples,
                "k-NN with k=" + std::to_string(k) + " needs more than " +
                    std::to_string(k) + " samples, got " + std::to_string(n));
  }
  // Exact squared distances computed entrywise; the Gram-matrix shortcut
  // loses the ties that the deterministic tie-break relies on.
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Eigen::Index>> row(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t t = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      row[t++] = {(x.col(i) - x.col(j)).squaredNorm(), j};
    }
    std::partial_sort(row.begin(), row.begin() + k, row.end());
    auto& nn = out[static_cast<std::size_t>(i)];
    nn.reserve(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) nn.push_back(row[static_cast<std::size_t>(q)].second);
  }
  return out;
}

Hypergraph build_knn_hypergraph(const Eigen::MatrixXd& x, int k) {
  const auto neighbours = knn_indices(x, k);
  const Eigen::Index n = x.cols();
  Hypergraph h;
  h.incidence = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index e = 0; e < n; ++e) {
    h.incidence(e, e) = 1.0;
    for (Eigen::Index j : neighbours[static_cast<std::size_t>(e)]) h.incidence(e, j) = 1.0;
  }
  h.edge_weights = Eigen::VectorXd::Ones(n);
  return compute_weight_and_laplacian(std::move(h));
}

Hypergraph build_knn_pairwise_graph(const Eigen::MatrixXd& x, int k) {
  const auto neighbours = knn_indices(x, k);
  const Eigen::Index n = x.cols();
  Hypergraph h;
  h.incidence = Eigen::MatrixXd::Zero(n * k, n);
  Eigen::Index e = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j : neighbours[static_cast<std::size_t>(i)]) {
      h.incidence(e, i) = 1.0;
      h.incidence(e, j) = 1.0;
      ++e;
    }
  }
  h.edge_weights = Eigen::VectorXd::Ones(n * k);
  return compute_weight_and_laplacian(std::move(h));
}

Hypergraph compute_weight_and_laplacian(Hypergraph h) {
  const Eigen::Index edges = h.incidence.rows();
  const Eigen::Index n = h.incidence.cols();
  if (h.edge_weights.size() != edges) {
    throw Error(ErrorCode::kShape, "edge weight count does not match incidence rows");
  }
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "hypergraph has no vertices");
  if ((h.incidence.array() < 0.0).any() || (h.incidence.array() > 1.0).any()) {
    throw Error(ErrorCode::kInvalidConfig, "incidence entries must lie in [0, 1]");
  }

  h.edge_degrees = h.incidence.rowwise().sum();
  h.vertex_degrees = h.incidence.transpose() * h.edge_weights;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(h.vertex_degrees(i) > 0.0)) {
      throw Error(ErrorCode::kDegenerateVertex,
                  "vertex " + std::to_string(i) + " has zero degree");
    }
  }

  // Row scale of I: w_e / D_e, zero for empty hyperedges.
  Eigen::VectorXd edge_scale(edges);
  for (Eigen::Index e = 0; e < edges; ++e) {
    edge_scale(e) = h.edge_degrees(e) > 0.0 ? h.edge_weights(e) / h.edge_degrees(e) : 0.0;
  }
  const Eigen::VectorXd inv_sqrt_dx = h.vertex_degrees.array().rsqrt();
  const Eigen::MatrixXd scaled = h.incidence * inv_sqrt_dx.asDiagonal();  // I D_x^-1/2
  h.weight = scaled.transpose() * edge_scale.asDiagonal() * scaled;
  // Exact symmetry regardless of summation order.
  h.weight = 0.5 * (h.weight + h.weight.transpose()).eval();
  h.laplacian = Eigen::MatrixXd::Identity(n, n) - h.weight;
  return h;
}

}  // namespace spsc
