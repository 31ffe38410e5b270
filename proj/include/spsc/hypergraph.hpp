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

#ifndef SPSC_HYPERGRAPH_HPP
#define SPSC_HYPERGRAPH_HPP

#include <vector>

#include <Eigen/Dense>

namespace spsc {

// Hypergraph over the n samples.
//
//   incidence       |E| x n, entry (e, i) is the membership of vertex i in
//                   hyperedge e (binary for the k-NN builders)
//   edge_weights    diag of W_e
//   edge_degrees    D_e(e) = sum_i incidence(e, i)
//   vertex_degrees  D_x(i) = sum_e w_e(e) * incidence(e, i)
//   weight          W = D_x^-1/2 I^T W_e D_e^-1 I D_x^-1/2      (n x n)
//   laplacian       L = Identity - W
//
// `weight` and `laplacian` are empty until compute_weight_and_laplacian runs.
struct Hypergraph {
  Eigen::MatrixXd incidence;
  Eigen::VectorXd edge_weights;
  Eigen::VectorXd edge_degrees;
  Eigen::VectorXd vertex_degrees;
  Eigen::MatrixXd weight;
  Eigen::MatrixXd laplacian;

  Eigen::Index edges() const { return incidence.rows(); }
  Eigen::Index vertices() const { return incidence.cols(); }
  bool has_laplacian() const { return laplacian.size() != 0; }
};

/// One hyperedge per vertex: the vertex itself plus its k nearest neighbours
/// by Euclidean distance (ties go to the smaller index). Unit edge weights.
/// W and L are filled in. Throws kInsufficientSamples when n <= k.
Hypergraph build_knn_hypergraph(const Eigen::MatrixXd& x, int k);

/// Pairwise k-NN graph expressed as 2-vertex hyperedges {i, j} for every
/// neighbour j of i, so the same Laplacian machinery applies. W and L filled.
Hypergraph build_knn_pairwise_graph(const Eigen::MatrixXd& x, int k);

/// Indices of the k nearest neighbours of every column (self excluded),
/// ordered by (distance, index).
std::vector<std::vector<Eigen::Index>> knn_indices(const Eigen::MatrixXd& x, int k);

/// Recomputes degrees, W and L from incidence and edge weights. Hyperedges
/// with no members contribute nothing. Throws kDegenerateVertex when a
/// vertex has zero degree.
Hypergraph compute_weight_and_laplacian(Hypergraph h);

}  // namespace spsc

#endif  // SPSC_HYPERGRAPH_HPP
