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

#ifndef SPSC_EVALUATION_HPP
#define SPSC_EVALUATION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spsc {

struct KMeansResult {
  std::vector<int> assignments;
  Eigen::MatrixXd centers;  // d x k
  int iterations = 0;
};

/// Lloyd's algorithm on the columns of `points`. Centers start at k distinct
/// randomly chosen columns; an emptied cluster takes the point farthest from
/// its own center. Stops when assignments repeat or after `max_iters`.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iters = 300);

/// Maximum-profit assignment on a rectangular matrix (rows to columns).
/// Returns, for each row, the matched column or -1 when rows > cols.
std::vector<int> hungarian_max(const Eigen::MatrixXd& profit);

/// Share of points matched under the best one-to-one cluster-to-class map.
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. When either
/// entropy vanishes the value is 1 for identical partitions, else 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

struct ClusterResult {
  std::vector<int> assignments;  // run with the best accuracy
  double acc = 0.0;              // means over runs
  double nmi = 0.0;
  double acc_std = 0.0;          // population standard deviations
  double nmi_std = 0.0;
  std::vector<std::pair<double, double>> per_run;  // (acc, nmi)
};

/// k-means with seeds seed, seed + 1, ..., scored against `labels`.
ClusterResult evaluate_repeated(const Eigen::MatrixXd& points, int k,
                                const std::vector<int>& labels, int repeats,
                                std::uint64_t seed);

}  // namespace spsc

#endif  // SPSC_EVALUATION_HPP
