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

#ifndef SPSC_SOLVERS_HPP
#define SPSC_SOLVERS_HPP

#include <vector>

#include <Eigen/Dense>

#include "spsc/hypergraph.hpp"
#include "spsc/spl.hpp"

namespace spsc {

// B: m x r dictionary, columns in the unit l2 ball.
// S: r x n codes.
// Q: |E| x r consistency dictionary (reconstructs hyperedge membership).

struct RegularizationConfig {
  double alpha = 0.0;  // Laplacian smoothing, alpha * tr(S L S^T)
  double beta = 0.02;  // sparsity, beta * |S|_1
  double gamma = 0.0;  // incidence consistency, gamma * |I - Q S|_F^2
};

void validate(const RegularizationConfig& reg);

struct ObjectiveTerms {
  double reconstruction = 0.0;  // sum_ij v_ij (x_ij - (BS)_ij)^2
  double penalty = 0.0;         // f(V; lambda)
  double consistency = 0.0;     // gamma |I - QS|^2
  double laplacian = 0.0;       // alpha tr(S L S^T)
  double sparsity = 0.0;        // beta |S|_1

  double total() const { return data() + penalty; }
  // Everything except the self-paced penalty. Summed directly: at a large
  // pace the penalty dwarfs the rest and total() - penalty loses digits.
  double data() const { return reconstruction + consistency + laplacian + sparsity; }
};

/// Full self-paced objective, term by term. `graph` and `q` may be null when
/// alpha and gamma are zero.
ObjectiveTerms objective_terms(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                               const Eigen::MatrixXd& s, const Eigen::MatrixXd* q,
                               const Hypergraph* graph, const WeightState& weights,
                               const RegularizationConfig& reg);

double objective_value(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& s, const Eigen::MatrixXd* q,
                       const Hypergraph* graph, const WeightState& weights,
                       const RegularizationConfig& reg);

/// Rescales columns with norm > 1 onto the unit sphere; idempotent.
Eigen::MatrixXd project_columns_unit_ball(Eigen::MatrixXd b);

struct DictionaryUpdate {
  Eigen::MatrixXd dictionary;
  double objective = 0.0;     // weighted squared residual at `dictionary`
  double kkt_residual = 0.0;  // dual solver only
  int iterations = 0;
};

/// min_B |X' - B S'|_F^2  s.t. |b_j|^2 <= 1, solved through the Lagrange
/// dual with projected Newton ascent on the multipliers. Atoms whose code row
/// is identically zero do not enter the problem; they keep the matching
/// column of `warm_start` (projected) or become zero without one.
DictionaryUpdate b_step_lagrange_dual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s,
                                      const Eigen::MatrixXd* warm_start = nullptr);

struct ProjectedGradientOptions {
  int max_iters = 500;
  double rel_tol = 1e-9;
};

/// min_B sum_ij w_ij (x_ij - (BS)_ij)^2  s.t. |b_j|^2 <= 1, by accelerated
/// projected gradient with backtracking. Monotone: the objective never rises
/// above its value at (the projection of) `b0`.
DictionaryUpdate b_step_projected_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s,
                                           const Eigen::MatrixXd& element_weights,
                                           const Eigen::MatrixXd& b0,
                                           ProjectedGradientOptions options = {});

struct CoordinateDescentOptions {
  double tol = 1e-9;  // stop when the largest coordinate move falls below
  int max_passes = 100000;
};

/// argmin_s  s^T A s - 2 h^T s + beta |s|_1  by cyclic coordinate descent
/// with exact soft-threshold updates, starting from `s`. A must be PSD.
Eigen::VectorXd solve_l1_quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& h,
                                   double beta, Eigen::VectorXd s,
                                   CoordinateDescentOptions options = {});

// The S-step problem for fixed B, Q, weights and graph:
//
//   sum_ij w_ij (x_ij - (BS)_ij)^2 + gamma |I - QS|^2 + alpha tr(S L S^T)
//     + beta |S|_1
//
// Restricted to column i with the other columns fixed this is
//   s^T A_i s - 2 h_i^T s + beta |s|_1 + const.
class CodeProblem {
 public:
  CodeProblem(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
              const Eigen::MatrixXd& element_weights, const RegularizationConfig& reg,
              const Hypergraph* graph = nullptr, const Eigen::MatrixXd* q = nullptr);

  Eigen::Index samples() const { return x_.cols(); }
  Eigen::Index atoms() const { return b_.cols(); }

  /// Quadratic model (A_i, h_i) of column i given the current codes.
  void column_model(Eigen::Index i, const Eigen::MatrixXd& s, Eigen::MatrixXd& a,
                    Eigen::VectorXd& h) const;

  /// Objective restricted to column i (constant terms included, so that
  /// differences match the full objective).
  double column_objective(Eigen::Index i, const Eigen::MatrixXd& s,
                          const Eigen::VectorXd& column) const;

  double objective(const Eigen::MatrixXd& s) const;

  const RegularizationConfig& reg() const { return reg_; }

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd w_;
  RegularizationConfig reg_;
  const Hypergraph* graph_;  // not owned
  Eigen::MatrixXd q_;
  std::vector<bool> uniform_column_;  // w constant down column i
  Eigen::MatrixXd gram_;     // B^T B
  Eigen::MatrixXd q_gram_;   // gamma Q^T Q
  Eigen::MatrixXd q_target_; // gamma Q^T I
  // Off-diagonal nonzeros of L per column: (row, value).
  std::vector<std::vector<std::pair<Eigen::Index, double>>> coupling_;
};

/// Minimizer of the column-i subproblem, warm-started from s.col(i).
Eigen::VectorXd s_step_column(Eigen::Index i, const CodeProblem& problem,
                              const Eigen::MatrixXd& s, CoordinateDescentOptions options = {});

struct SweepOptions {
  int max_sweeps = 50;
  double rel_tol = 1e-7;
  CoordinateDescentOptions column;
};

struct SweepResult {
  Eigen::MatrixXd codes;
  std::vector<double> objectives;  // before the first sweep, then after each
  int sweeps = 0;
};

/// Gauss-Seidel over columns in index order.
SweepResult s_step_sweep(const CodeProblem& problem, Eigen::MatrixXd s0,
                         SweepOptions options = {});

inline constexpr double kConsistencyRidge = 1e-8;

/// Q = argmin |I - QS|^2 + tau |Q|^2 = I S^T (S S^T + tau Id)^-1.
Eigen::MatrixXd q_step(const Eigen::MatrixXd& incidence, const Eigen::MatrixXd& s,
                       double tau = kConsistencyRidge);

}  // namespace spsc

#endif  // SPSC_SOLVERS_HPP
