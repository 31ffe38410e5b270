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

#include "spsc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace spsc {

std::string to_string(QPolicy policy) {
  return policy == QPolicy::kFrozen ? "frozen" : "ridge";
}

QPolicy parse_q_policy(std::string_view text) {
  if (text == "frozen") return QPolicy::kFrozen;
  if (text == "ridge") return QPolicy::kRidge;
  throw Error(ErrorCode::kInvalidConfig, "unknown Q policy '" + std::string(text) + "'");
}

void validate(const SpscConfig& cfg) {
  validate(cfg.reg);
  if (!(cfg.mu > 1.0)) throw Error(ErrorCode::kInvalidPace, "pace step mu must exceed 1");
  if (!(cfg.select_fraction0 > 0.0 && cfg.select_fraction0 <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "select_fraction0 must lie in (0, 1]");
  }
  if (cfg.max_outer_iters < 1 || cfg.init_max_iters < 0) {
    throw Error(ErrorCode::kInvalidConfig, "iteration caps must be positive");
  }
  if (cfg.dictionary_size < 1) throw Error(ErrorCode::kInvalidConfig, "dictionary size must be >= 1");
  if (!(cfg.lambda0_scale > 0.0) || !(cfg.tol_objective >= 0.0) ||
      !(cfg.tol_weight_saturation >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "tolerances and lambda0_scale must be non-negative");
  }
}

namespace {

bool uses_q(const SpscConfig& cfg, const Hypergraph* graph) {
  return cfg.reg.gamma > 0.0 && graph != nullptr;
}

const Eigen::MatrixXd* q_ptr(const SpscConfig& cfg, const Hypergraph* graph,
                             const Eigen::MatrixXd& q) {
  return uses_q(cfg, graph) ? &q : nullptr;
}

double relative_change(double before, double after) {
  return (before - after) / std::max(std::abs(before), 1e-300);
}

// B-step at the variant's granularity, accepted only when it does not raise
// the weighted residual (the solvers are exact up to round-off, this keeps
// the alternation monotone regardless).
void update_dictionary(const Eigen::MatrixXd& x, const WeightState& weights,
                       const Eigen::MatrixXd& element_weights, CodingState& st) {
  const auto residual = [&](const Eigen::MatrixXd& b) {
    return (element_weights.array() * (x - b * st.codes).array().square()).sum();
  };
  const double before = residual(st.dictionary);
  Eigen::MatrixXd candidate;
  if (weights.variant == Variant::kSample) {
    // Sample weights fold into column scaling: X diag(sqrt v), S diag(sqrt v).
    const Eigen::VectorXd root = weights.weights.row(0).transpose().cwiseSqrt();
    const Eigen::MatrixXd xs = x * root.asDiagonal();
    const Eigen::MatrixXd ss = st.codes * root.asDiagonal();
    candidate = b_step_lagrange_dual(xs, ss, &st.dictionary).dictionary;
  } else {
    candidate =
        b_step_projected_gradient(x, st.codes, element_weights, st.dictionary).dictionary;
  }
  if (residual(candidate) <= before) st.dictionary = std::move(candidate);
}

void update_codes(const Eigen::MatrixXd& x, const Hypergraph* graph, const SpscConfig& cfg,
                  const Eigen::MatrixXd& element_weights, CodingState& st) {
  const CodeProblem problem(x, st.dictionary, element_weights, cfg.reg, graph,
                            q_ptr(cfg, graph, st.consistency));
  st.codes = s_step_sweep(problem, st.codes).codes;
}

void update_consistency(const Hypergraph* graph, const SpscConfig& cfg, CodingState& st) {
  if (!uses_q(cfg, graph) || cfg.q_policy != QPolicy::kRidge) return;
  Eigen::MatrixXd candidate = q_step(graph->incidence, st.codes);
  if ((graph->incidence - candidate * st.codes).squaredNorm() <=
      (graph->incidence - st.consistency * st.codes).squaredNorm()) {
    st.consistency = std::move(candidate);
  }
}

double all_selected_objective(const Eigen::MatrixXd& x, const Hypergraph* graph,
                              const SpscConfig& cfg, const CodingState& st) {
  const WeightState ones = full_selection(Variant::kSample, x.rows(), x.cols(), 1.0);
  return objective_terms(x, st.dictionary, st.codes, q_ptr(cfg, graph, st.consistency), graph,
                         ones, cfg.reg)
      .data();
}

void check_inputs(const Eigen::MatrixXd& x, const Hypergraph* graph, const SpscConfig& cfg) {
  validate(cfg);
  if (x.size() == 0) throw Error(ErrorCode::kEmptyInput, "empty data matrix");
  if (!x.allFinite()) throw Error(ErrorCode::kInvalidConfig, "data matrix has non-finite entries");
  if ((cfg.reg.alpha > 0.0 || cfg.reg.gamma > 0.0) && graph == nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "alpha or gamma > 0 requires a hypergraph");
  }
  if (graph != nullptr && graph->vertices() != x.cols()) {
    throw Error(ErrorCode::kShape, "hypergraph vertex count does not match sample count");
  }
}

}  // namespace

CodingState continue_sc(const Eigen::MatrixXd& x, const Hypergraph* graph,
                        const SpscConfig& cfg, CodingState st, int iterations) {
  check_inputs(x, graph, cfg);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(x.rows(), x.cols());
  const WeightState all = full_selection(Variant::kSample, x.rows(), x.cols(), 1.0);
  for (int it = 0; it < iterations; ++it) {
    update_dictionary(x, all, ones, st);
    update_codes(x, graph, cfg, ones, st);
    update_consistency(graph, cfg, st);
    st.objectives.push_back(all_selected_objective(x, graph, cfg, st));
    ++st.iterations;
  }
  return st;
}

CodingState fit_csc_init(const Eigen::MatrixXd& x, const Hypergraph* graph,
                         const SpscConfig& cfg) {
  check_inputs(x, graph, cfg);
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  const Eigen::Index r = cfg.dictionary_size;
  if (r > n) {
    throw Error(ErrorCode::kInvalidConfig, "dictionary size " + std::to_string(r) +
                                               " exceeds sample count " + std::to_string(n));
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::Index> columns(static_cast<std::size_t>(n));
  std::iota(columns.begin(), columns.end(), Eigen::Index{0});
  std::shuffle(columns.begin(), columns.end(), rng);

  constexpr double kJitter = 0.01;
  CodingState st;
  st.dictionary.resize(m, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const auto source = x.col(columns[static_cast<std::size_t>(j)]);
    const double scale = kJitter * source.norm() / std::sqrt(static_cast<double>(m));
    for (Eigen::Index i = 0; i < m; ++i) st.dictionary(i, j) = source(i) + scale * gauss(rng);
  }
  st.dictionary = project_columns_unit_ball(std::move(st.dictionary));
  st.codes = Eigen::MatrixXd::Zero(r, n);
  st.consistency = Eigen::MatrixXd::Zero(graph != nullptr ? graph->edges() : 0, r);

  // First codes ignore the (still empty) Q; Q is then fit to them.
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(m, n);
  {
    SpscConfig seed_cfg = cfg;
    seed_cfg.reg.gamma = 0.0;
    update_codes(x, graph, seed_cfg, ones, st);
  }
  if (uses_q(cfg, graph)) st.consistency = q_step(graph->incidence, st.codes);
  st.objectives.push_back(all_selected_objective(x, graph, cfg, st));

  for (int it = 0; it < cfg.init_max_iters; ++it) {
    st = continue_sc(x, graph, cfg, std::move(st), 1);
    const auto& obj = st.objectives;
    if (relative_change(obj[obj.size() - 2], obj.back()) < cfg.init_tol) break;
  }
  return st;
}

FitResult fit_spsc(const Eigen::MatrixXd& x, const Hypergraph* graph, const SpscConfig& cfg,
                   const IterationObserver& observer) {
  check_inputs(x, graph, cfg);
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();

  FitResult result;
  result.init = fit_csc_init(x, graph, cfg);
  CodingState st = result.init;

  LossField losses = compute_losses(x, st.dictionary, st.codes, cfg.variant);
  double lambda = init_lambda(losses, cfg.select_fraction0) * cfg.lambda0_scale;
  result.lambda0 = lambda;

  // Initialization solved with everything selected.
  WeightState weights = full_selection(cfg.variant, m, n, lambda, cfg.mu, cfg.spl_mode);
  double previous_data = st.objectives.back();

  const auto objective = [&](const WeightState& v) {
    return objective_value(x, st.dictionary, st.codes, q_ptr(cfg, graph, st.consistency), graph,
                           v, cfg.reg);
  };

  for (int t = 0; t < cfg.max_outer_iters; ++t) {
    TraceRecord rec;
    rec.iteration = t;
    rec.lambda = lambda;
    weights.lambda = lambda;
    rec.objective_before = objective(weights);

    weights = weight_update(losses, lambda, cfg.spl_mode, cfg.mu);
    rec.objective_after_v = objective(weights);
    const Eigen::MatrixXd element_weights = effective_weight_matrix(weights, m, n);

    update_dictionary(x, weights, element_weights, st);
    rec.objective_after_b = objective(weights);
    update_codes(x, graph, cfg, element_weights, st);
    rec.objective_after_s = objective(weights);
    update_consistency(graph, cfg, st);
    rec.objective_after_q = objective(weights);

    losses = compute_losses(x, st.dictionary, st.codes, cfg.variant);
    rec.terms = objective_terms(x, st.dictionary, st.codes, q_ptr(cfg, graph, st.consistency),
                                graph, weights, cfg.reg);
    rec.selected_fraction =
        static_cast<double>((element_weights.array() > 0.0).count()) /
        static_cast<double>(element_weights.size());
    rec.mean_weight = element_weights.mean();
    rec.min_weight = element_weights.minCoeff();
    if (cfg.keep_weight_snapshots) {
      rec.snapshot = result.trace.weight_snapshots.size();
      result.trace.weight_snapshots.push_back(weights.weights);
    }
    result.trace.records.push_back(rec);
    ++result.iterations;

    if (!std::isfinite(rec.terms.total())) {
      throw FitAborted("objective became non-finite at outer iteration " + std::to_string(t),
                       result.trace);
    }
    if (observer) observer(rec, weights);

    // Converged once everything is (nearly) fully selected and the
    // objective without the pace penalty has stopped moving.
    const double data = rec.terms.data();
    const bool saturated = rec.min_weight >= 1.0 - cfg.tol_weight_saturation;
    const bool stalled = std::abs(relative_change(previous_data, data)) < cfg.tol_objective;
    previous_data = data;
    if (saturated && stalled) {
      result.converged = true;
      break;
    }
    weights = advance_pace(weights);
    lambda = weights.lambda;
  }

  result.dictionary = std::move(st.dictionary);
  result.codes = std::move(st.codes);
  result.consistency = std::move(st.consistency);
  result.weights = std::move(weights);
  return result;
}

}  // namespace spsc
