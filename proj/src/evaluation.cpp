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

#include "spsc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "spsc/error.hpp"

namespace spsc {

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iters) {
  const Eigen::Index n = points.cols();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidConfig, "k-means needs 1 <= k <= n (k=" + std::to_string(k) +
                                               ", n=" + std::to_string(n) + ")");
  }
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  KMeansResult out;
  out.centers.resize(points.rows(), k);
  for (int c = 0; c < k; ++c) out.centers.col(c) = points.col(order[static_cast<std::size_t>(c)]);
  out.assignments.assign(static_cast<std::size_t>(n), -1);

  std::vector<double> own_distance(static_cast<std::size_t>(n));
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.col(i) - out.centers.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      auto& slot = out.assignments[static_cast<std::size_t>(i)];
      if (slot != best) changed = true;
      slot = best;
      own_distance[static_cast<std::size_t>(i)] = best_d;
    }
    ++out.iterations;

    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : out.assignments) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      // Farthest point (from its own center) among clusters that can spare one.
      Eigen::Index donor = -1;
      double far = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = out.assignments[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(a)] > 1 && own_distance[static_cast<std::size_t>(i)] > far) {
          far = own_distance[static_cast<std::size_t>(i)];
          donor = i;
        }
      }
      if (donor < 0) break;
      --sizes[static_cast<std::size_t>(out.assignments[static_cast<std::size_t>(donor)])];
      out.assignments[static_cast<std::size_t>(donor)] = c;
      own_distance[static_cast<std::size_t>(donor)] = 0.0;
      sizes[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(points.rows(), k);
    for (Eigen::Index i = 0; i < n; ++i) sums.col(out.assignments[static_cast<std::size_t>(i)]) += points.col(i);
    for (int c = 0; c < k; ++c) {
      out.centers.col(c) = sums.col(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    }
    if (!changed) break;
  }
  return out;
}

std::vector<int> hungarian_max(const Eigen::MatrixXd& profit) {
  const auto rows = static_cast<int>(profit.rows());
  const auto cols = static_cast<int>(profit.cols());
  const int size = std::max(rows, cols);
  if (size == 0) return {};
  // Square, zero-padded cost matrix; maximization by negation.
  const double top = profit.size() > 0 ? profit.maxCoeff() : 0.0;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(size, size, top);
  cost.topLeftCorner(rows, cols) = (top - profit.array()).matrix();

  // Shortest augmenting path with potentials (1-indexed, row 0 is a sentinel).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(size + 1), 0.0), v(static_cast<std::size_t>(size + 1), 0.0);
  std::vector<int> match(static_cast<std::size_t>(size + 1), 0), way(static_cast<std::size_t>(size + 1), 0);
  for (int i = 1; i <= size; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(size + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(size + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= size; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= size; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= size; ++j) {
    const int i = match[static_cast<std::size_t>(j)];
    if (i >= 1 && i <= rows && j <= cols) assignment[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return assignment;
}

namespace {

// Maps arbitrary integer labels onto 0..K-1 in order of first appearance.
std::vector<int> compact(const std::vector<int>& labels, int& count) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  count = static_cast<int>(ids.size());
  return out;
}

Eigen::MatrixXd contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::kShape, "label vectors differ in length (" +
                                       std::to_string(pred.size()) + " vs " +
                                       std::to_string(truth.size()) + ")");
  }
  int kp = 0;
  int kt = 0;
  const auto p = compact(pred, kp);
  const auto t = compact(truth, kt);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(kp, kt);
  for (std::size_t i = 0; i < p.size(); ++i) table(p[i], t[i]) += 1.0;
  return table;
}

double entropy(const Eigen::VectorXd& counts, double total) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0.0) {
      const double p = counts(i) / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Eigen::MatrixXd table = contingency(pred, truth);
  if (pred.empty()) throw Error(ErrorCode::kEmptyInput, "no labels to score");
  const auto match = hungarian_max(table);
  double matched = 0.0;
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (match[i] >= 0) matched += table(static_cast<Eigen::Index>(i), match[i]);
  }
  return matched / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Eigen::MatrixXd table = contingency(pred, truth);
  if (pred.empty()) throw Error(ErrorCode::kEmptyInput, "no labels to score");
  const double total = static_cast<double>(pred.size());
  const Eigen::VectorXd rows = table.rowwise().sum();
  const Eigen::VectorXd cols = table.colwise().sum().transpose();
  const double hp = entropy(rows, total);
  const double ht = entropy(cols, total);
  if (hp <= 0.0 || ht <= 0.0) {
    // Identical set partitions: same block count and a one-to-one table.
    const bool identical = table.rows() == table.cols() &&
                           ((table.array() > 0.0).count() == table.rows());
    return identical ? 1.0 : 0.0;
  }
  double mi = 0.0;
  for (Eigen::Index a = 0; a < table.rows(); ++a) {
    for (Eigen::Index b = 0; b < table.cols(); ++b) {
      const double c = table(a, b);
      if (c > 0.0) mi += (c / total) * std::log(c * total / (rows(a) * cols(b)));
    }
  }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

ClusterResult evaluate_repeated(const Eigen::MatrixXd& points, int k,
                                const std::vector<int>& labels, int repeats,
                                std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorCode::kInvalidConfig, "repeats must be >= 1");
  if (labels.size() != static_cast<std::size_t>(points.cols())) {
    throw Error(ErrorCode::kShape, "label count does not match point count");
  }
  ClusterResult out;
  double best = -1.0;
  for (int run = 0; run < repeats; ++run) {
    const KMeansResult km = kmeans(points, k, seed + static_cast<std::uint64_t>(run));
    const double acc = clustering_accuracy(km.assignments, labels);
    const double score = nmi(km.assignments, labels);
    out.per_run.emplace_back(acc, score);
    if (acc > best) {
      best = acc;
      out.assignments = km.assignments;
    }
  }
  const double count = static_cast<double>(repeats);
  for (const auto& [acc, score] : out.per_run) {
    out.acc += acc / count;
    out.nmi += score / count;
  }
  for (const auto& [acc, score] : out.per_run) {
    out.acc_std += (acc - out.acc) * (acc - out.acc) / count;
    out.nmi_std += (score - out.nmi) * (score - out.nmi) / count;
  }
  out.acc_std = std::sqrt(out.acc_std);
  out.nmi_std = std::sqrt(out.nmi_std);
  return out;
}

}  // namespace spsc
