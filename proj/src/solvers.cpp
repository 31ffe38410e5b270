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

#include "spsc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spsc/error.hpp"

namespace spsc {

void validate(const RegularizationConfig& reg) {
  if (!(reg.alpha >= 0.0) || !(reg.gamma >= 0.0) || !(reg.beta > 0.0) ||
      !std::isfinite(reg.alpha) || !std::isfinite(reg.beta) || !std::isfinite(reg.gamma)) {
    throw Error(ErrorCode::kInvalidConfig, "need alpha >= 0, beta > 0, gamma >= 0");
  }
}

namespace {

void require_graph_terms(const Eigen::MatrixXd* q, const Hypergraph* graph,
                         const RegularizationConfig& reg, Eigen::Index r, Eigen::Index n) {
  if (reg.alpha > 0.0) {
    if (graph == nullptr || !graph->has_laplacian()) {
      throw Error(ErrorCode::kInvalidConfig, "alpha > 0 needs a hypergraph Laplacian");
    }
    if (graph->laplacian.rows() != n) {
      throw Error(ErrorCode::kShape, "Laplacian size does not match sample count");
    }
  }
  if (reg.gamma > 0.0) {
    if (graph == nullptr || q == nullptr) {
      throw Error(ErrorCode::kInvalidConfig, "gamma > 0 needs a hypergraph and Q");
    }
    if (graph->incidence.cols() != n || q->rows() != graph->incidence.rows() ||
        q->cols() != r) {
      throw Error(ErrorCode::kShape, "Q must be |E| x r");
    }
  }
}

double weighted_residual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) {
  return (w.array() * (x - b * s).array().square()).sum();
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

ObjectiveTerms objective_terms(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                               const Eigen::MatrixXd& s, const Eigen::MatrixXd* q,
                               const Hypergraph* graph, const WeightState& weights,
                               const RegularizationConfig& reg) {
  if (b.rows() != x.rows() || s.cols() != x.cols() || b.cols() != s.rows()) {
    throw Error(ErrorCode::kShape, "objective: X, B, S shapes disagree");
  }
  require_graph_terms(q, graph, reg, s.rows(), s.cols());
  const Eigen::MatrixXd w = effective_weight_matrix(weights, x.rows(), x.cols());

  ObjectiveTerms t;
  t.reconstruction = weighted_residual(x, b, s, w);
  t.penalty = spl_penalty(weights);
  if (reg.gamma > 0.0) {
    t.consistency = reg.gamma * (graph->incidence - (*q) * s).squaredNorm();
  }
  if (reg.alpha > 0.0) {
    t.laplacian = reg.alpha * (s * graph->laplacian).cwiseProduct(s).sum();
  }
  t.sparsity = reg.beta * s.cwiseAbs().sum();
  return t;
}

double objective_value(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& s, const Eigen::MatrixXd* q,
                       const Hypergraph* graph, const WeightState& weights,
                       const RegularizationConfig& reg) {
  return objective_terms(x, b, s, q, graph, weights, reg).total();
}

Eigen::MatrixXd project_columns_unit_ball(Eigen::MatrixXd b) {
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const double norm = b.col(j).norm();
    if (norm > 1.0) b.col(j) /= norm;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Dictionary update, Lagrange dual.
//
// With multipliers l >= 0 the Lagrangian is minimized by B(l) = M (G + L)^-1,
// M = X S^T, G = S S^T, L = diag(l). The dual
//
//   D(l) = |X|^2 - tr(M (G + L)^-1 M^T) - sum_j l_j
//
// is concave with gradient |b_j|^2 - 1 and Hessian
// -2 (B^T B) o (G + L)^-1, so projected Newton on the free multipliers
// converges in a handful of steps.
// ---------------------------------------------------------------------------

namespace {

struct DualPoint {
  Eigen::MatrixXd dictionary;
  Eigen::MatrixXd inverse;
  Eigen::VectorXd gradient;
  double value = 0.0;
  bool ok = false;
};

DualPoint evaluate_dual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& g, double x_energy,
                        const Eigen::VectorXd& multipliers, double ridge) {
  DualPoint p;
  Eigen::MatrixXd a = g;
  a.diagonal() += multipliers;
  a.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return p;
  p.inverse = llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
  p.dictionary = m * p.inverse;
  p.gradient = p.dictionary.colwise().squaredNorm().transpose().array() - 1.0;
  p.value = x_energy - (p.dictionary.transpose() * m).trace() - multipliers.sum();
  p.ok = p.dictionary.allFinite();
  return p;
}

double projected_residual(const Eigen::VectorXd& multipliers, const Eigen::VectorXd& gradient) {
  double res = 0.0;
  for (Eigen::Index j = 0; j < multipliers.size(); ++j) {
    res = std::max(res, std::abs(multipliers(j) - std::max(0.0, multipliers(j) + gradient(j))));
  }
  return res;
}

struct DualSolve {
  DualPoint point;
  Eigen::VectorXd multipliers;
  double residual = 0.0;
  int iterations = 0;
};

// Projected Newton ascent on D(l) from `start`.
DualSolve newton_dual(const Eigen::MatrixXd& mm, const Eigen::MatrixXd& g, double x_energy,
                      Eigen::VectorXd lambda, double ridge) {
  constexpr int kMaxNewton = 200;
  constexpr double kKktTol = 1e-11;
  const Eigen::Index k = g.rows();
  DualPoint point = evaluate_dual(mm, g, x_energy, lambda, ridge);
  while (!point.ok) {
    ridge *= 100.0;
    if (ridge > 1e-2) throw Error(ErrorCode::kNumerical, "B-step dual: Gram matrix unusable");
    point = evaluate_dual(mm, g, x_energy, lambda, ridge);
  }

  int iter = 0;
  for (; iter < kMaxNewton; ++iter) {
    if (projected_residual(lambda, point.gradient) <= kKktTol) break;

    // Free multipliers: strictly positive, or at zero with an ascent
    // direction into the interior.
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (lambda(j) > 0.0 || point.gradient(j) > 0.0) free.push_back(j);
    }
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(k);
    if (!free.empty()) {
      const auto f = static_cast<Eigen::Index>(free.size());
      const Eigen::MatrixXd btb = point.dictionary.transpose() * point.dictionary;
      Eigen::MatrixXd neg_hessian(f, f);
      Eigen::VectorXd grad_free(f);
      for (Eigen::Index a = 0; a < f; ++a) {
        const Eigen::Index ja = free[static_cast<std::size_t>(a)];
        grad_free(a) = point.gradient(ja);
        for (Eigen::Index c = 0; c < f; ++c) {
          const Eigen::Index jc = free[static_cast<std::size_t>(c)];
          neg_hessian(a, c) = 2.0 * btb(ja, jc) * point.inverse(ja, jc);
        }
      }
      neg_hessian.diagonal().array() += 1e-14 * std::max(1.0, neg_hessian.diagonal().maxCoeff());
      Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hessian);
      Eigen::VectorXd step = ldlt.solve(grad_free);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) step = grad_free;
      for (Eigen::Index a = 0; a < f; ++a) direction(free[static_cast<std::size_t>(a)]) = step(a);
    }

    // Armijo backtracking on the projected path.
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Eigen::VectorXd trial = (lambda + t * direction).cwiseMax(0.0);
      DualPoint next = evaluate_dual(mm, g, x_energy, trial, ridge);
      if (!next.ok) continue;
      const double expected = point.gradient.dot(trial - lambda);
      if (next.value >= point.value + 1e-4 * expected - 1e-15 * std::abs(point.value)) {
        moved = (trial - lambda).lpNorm<Eigen::Infinity>() > 0.0;
        lambda = trial;
        point = std::move(next);
        break;
      }
    }
    if (!moved) break;
  }
  DualSolve out;
  out.residual = projected_residual(lambda, point.gradient);
  out.iterations = iter;
  out.point = std::move(point);
  out.multipliers = std::move(lambda);
  return out;
}

}  // namespace

DictionaryUpdate b_step_lagrange_dual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s,
                                      const Eigen::MatrixXd* warm_start) {
  if (x.cols() != s.cols()) throw Error(ErrorCode::kShape, "B-step: X and S column counts differ");
  if (warm_start != nullptr &&
      (warm_start->rows() != x.rows() || warm_start->cols() != s.rows())) {
    throw Error(ErrorCode::kShape, "B-step: warm start must be m x r");
  }
  const Eigen::Index m = x.rows();
  const Eigen::Index r = s.rows();

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < r; ++j) {
    if (s.row(j).squaredNorm() > 0.0) active.push_back(j);
  }

  DictionaryUpdate out;
  out.dictionary = warm_start != nullptr ? project_columns_unit_ball(*warm_start)
                                         : Eigen::MatrixXd::Zero(m, r);
  if (active.empty()) {
    out.objective = x.squaredNorm();
    return out;
  }

  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd s_active(k, s.cols());
  Eigen::MatrixXd center(m, k);
  for (Eigen::Index t = 0; t < k; ++t) {
    s_active.row(t) = s.row(active[static_cast<std::size_t>(t)]);
    center.col(t) = out.dictionary.col(active[static_cast<std::size_t>(t)]);
  }
  const Eigen::MatrixXd mm = x * s_active.transpose();
  const Eigen::MatrixXd g = s_active * s_active.transpose();
  const double x_energy = x.squaredNorm();
  const double scale = std::max(1.0, g.trace() / static_cast<double>(k));
  const double ridge = 1e-12 * scale;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(g, Eigen::EigenvaluesOnly);
  const bool well_posed = spectrum.eigenvalues().minCoeff() > 1e-8 * scale;

  Eigen::MatrixXd solved;
  if (well_posed) {
    DualSolve d = newton_dual(mm, g, x_energy, Eigen::VectorXd::Zero(k), ridge);
    out.kkt_residual = d.residual;
    out.iterations = d.iterations;
    solved = std::move(d.point.dictionary);
  } else {
    // Rank-deficient codes leave G + L singular at the optimum whenever an
    // inactive atom points into null(G). Proximal point instead: each round
    // solves min |X - BS|^2 + eps |B - C|^2, whose dual is the one above with
    // M + eps C, G + eps Id and |X|^2 + eps |C|^2, then recentres C.
    constexpr int kMaxRounds = 5000;
    const double eps = 1e-3 * scale;
    const Eigen::MatrixXd g_prox = g + eps * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
    const auto residual = [&](const Eigen::MatrixXd& b) { return (x - b * s_active).squaredNorm(); };
    double previous = residual(project_columns_unit_ball(center));
    for (int round = 0; round < kMaxRounds; ++round) {
      DualSolve d = newton_dual(mm + eps * center, g_prox,
                                x_energy + eps * center.squaredNorm(), lambda, ridge);
      out.iterations += d.iterations;
      out.kkt_residual = d.residual;
      lambda = std::move(d.multipliers);
      const double step = (d.point.dictionary - center).norm();
      center = std::move(d.point.dictionary);
      const double current = residual(project_columns_unit_ball(center));
      const bool flat = previous - current <= 1e-15 * std::max(1.0, current);
      previous = current;
      if (flat && step <= 1e-9 * std::max(1.0, center.norm())) break;
    }
    solved = std::move(center);
  }

  solved = project_columns_unit_ball(std::move(solved));
  for (Eigen::Index t = 0; t < k; ++t) {
    out.dictionary.col(active[static_cast<std::size_t>(t)]) = solved.col(t);
  }
  out.objective = (x - out.dictionary * s).squaredNorm();
  return out;
}

// ---------------------------------------------------------------------------
// Dictionary update, weighted projected gradient (monotone FISTA).
// ---------------------------------------------------------------------------

DictionaryUpdate b_step_projected_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s,
                                           const Eigen::MatrixXd& element_weights,
                                           const Eigen::MatrixXd& b0,
                                           ProjectedGradientOptions options) {
  if (x.cols() != s.cols() || b0.rows() != x.rows() || b0.cols() != s.rows() ||
      element_weights.rows() != x.rows() || element_weights.cols() != x.cols()) {
    throw Error(ErrorCode::kShape, "projected-gradient B-step: shapes disagree");
  }
  const auto& w = element_weights;
  auto value = [&](const Eigen::MatrixXd& b) { return weighted_residual(x, b, s, w); };
  auto gradient = [&](const Eigen::MatrixXd& b) -> Eigen::MatrixXd {
    Eigen::MatrixXd grad = -2.0 * (w.array() * (x - b * s).array()).matrix() * s.transpose();
    if (!grad.allFinite()) throw Error(ErrorCode::kNumerical, "non-finite B-step gradient");
    return grad;
  };

  DictionaryUpdate out;
  Eigen::MatrixXd current = project_columns_unit_ball(b0);
  double f_current = value(current);

  // Lipschitz bound of the gradient: 2 max(w) |S|_2^2.
  const double s_norm_sq =
      s.rows() > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s * s.transpose(),
                                                                    Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff()
                   : 0.0;
  const double lipschitz = 2.0 * std::max(w.maxCoeff(), 0.0) * s_norm_sq;
  if (!(lipschitz > 0.0)) {
    out.dictionary = std::move(current);
    out.objective = f_current;
    return out;
  }
  double step = 4.0 / lipschitz;

  Eigen::MatrixXd previous = current;
  Eigen::MatrixXd y = current;
  double momentum = 1.0;
  bool restarted = false;
  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    const double f_y = value(y);
    const Eigen::MatrixXd grad_y = gradient(y);
    Eigen::MatrixXd z;
    double f_z = 0.0;
    for (int ls = 0; ls < 80; ++ls) {
      z = project_columns_unit_ball(y - step * grad_y);
      f_z = value(z);
      const Eigen::MatrixXd diff = z - y;
      const double model =
          f_y + grad_y.cwiseProduct(diff).sum() + diff.squaredNorm() / (2.0 * step);
      if (f_z <= model + 1e-14 * std::abs(f_y)) break;
      step *= 0.5;
    }

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (f_z < f_current) {
      const double decrease = (f_current - f_z) / std::max(f_current, 1e-300);
      previous = current;
      current = z;
      f_current = f_z;
      y = current + ((momentum - 1.0) / next_momentum) * (current - previous);
      momentum = next_momentum;
      restarted = false;
      step *= 1.25;
      if (decrease < options.rel_tol) break;
    } else {
      // Momentum overshot; restart from the best point. Two failures in a
      // row mean no descent is available.
      if (restarted) break;
      restarted = true;
      momentum = 1.0;
      previous = current;
      y = current;
    }
  }
  out.dictionary = std::move(current);
  out.objective = f_current;
  out.iterations = iter;
  return out;
}

// ---------------------------------------------------------------------------
// Code update.
// ---------------------------------------------------------------------------

Eigen::VectorXd solve_l1_quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& h,
                                   double beta, Eigen::VectorXd s,
                                   CoordinateDescentOptions options) {
  const Eigen::Index r = a.rows();
  if (a.cols() != r || h.size() != r || s.size() != r) {
    throw Error(ErrorCode::kShape, "l1 quadratic: inconsistent sizes");
  }
  const double threshold = 0.5 * beta;
  Eigen::VectorXd g = a * s - h;  // half gradient of the smooth part
  for (int pass = 0; pass < options.max_passes; ++pass) {
    double largest_move = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) {
      const double akk = a(k, k);
      const double z = akk * s(k) - g(k);  // h_k - sum_{l != k} a_kl s_l
      double updated;
      if (akk > 0.0) {
        updated = soft_threshold(z, threshold) / akk;
      } else if (akk == 0.0 && std::abs(z) <= threshold) {
        updated = 0.0;
      } else {
        throw Error(ErrorCode::kNumerical,
                    "S-step: coordinate " + std::to_string(k) +
                        " has a non-positive curvature, the subproblem is not convex");
      }
      const double delta = updated - s(k);
      if (delta != 0.0) {
        g.noalias() += delta * a.col(k);
        s(k) = updated;
        largest_move = std::max(largest_move, std::abs(delta));
      }
    }
    if (!(largest_move >= options.tol)) break;
  }
  if (!s.allFinite()) throw Error(ErrorCode::kNumerical, "S-step produced non-finite codes");
  return s;
}

CodeProblem::CodeProblem(const Eigen::MatrixXd& x, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& element_weights,
                         const RegularizationConfig& reg, const Hypergraph* graph,
                         const Eigen::MatrixXd* q)
    : x_(x), b_(b), w_(element_weights), reg_(reg), graph_(graph) {
  if (b.rows() != x.rows() || element_weights.rows() != x.rows() ||
      element_weights.cols() != x.cols()) {
    throw Error(ErrorCode::kShape, "S-step: X, B, weights shapes disagree");
  }
  validate(reg);
  const Eigen::Index r = b.cols();
  const Eigen::Index n = x.cols();
  require_graph_terms(q, graph, reg, r, n);
  if (reg.gamma > 0.0) {
    q_ = *q;
    q_gram_ = reg.gamma * q_.transpose() * q_;
    q_target_ = reg.gamma * q_.transpose() * graph->incidence;
  }
  gram_ = b.transpose() * b;
  uniform_column_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto col = w_.col(i);
    uniform_column_[static_cast<std::size_t>(i)] = (col.array() == col(0)).all();
  }
  if (reg.alpha > 0.0) {
    coupling_.resize(static_cast<std::size_t>(n));
    const auto& l = graph->laplacian;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i && l(j, i) != 0.0) coupling_[static_cast<std::size_t>(i)].push_back({j, l(j, i)});
      }
    }
  }
}

void CodeProblem::column_model(Eigen::Index i, const Eigen::MatrixXd& s, Eigen::MatrixXd& a,
                               Eigen::VectorXd& h) const {
  const auto wi = w_.col(i);
  if (uniform_column_[static_cast<std::size_t>(i)]) {
    a = wi(0) * gram_;
    h = wi(0) * (b_.transpose() * x_.col(i));
  } else {
    a = b_.transpose() * wi.asDiagonal() * b_;
    h = b_.transpose() * wi.cwiseProduct(x_.col(i));
  }
  if (reg_.gamma > 0.0) {
    a += q_gram_;
    h += q_target_.col(i);
  }
  if (reg_.alpha > 0.0) {
    a.diagonal().array() += reg_.alpha * graph_->laplacian(i, i);
    for (const auto& [j, lij] : coupling_[static_cast<std::size_t>(i)]) {
      h.noalias() -= reg_.alpha * lij * s.col(j);
    }
  }
}

double CodeProblem::column_objective(Eigen::Index i, const Eigen::MatrixXd& s,
                                     const Eigen::VectorXd& column) const {
  double value = (w_.col(i).array() * (x_.col(i) - b_ * column).array().square()).sum();
  if (reg_.gamma > 0.0) {
    value += reg_.gamma * (graph_->incidence.col(i) - q_ * column).squaredNorm();
  }
  if (reg_.alpha > 0.0) {
    const auto& l = graph_->laplacian;
    Eigen::VectorXd coupled = Eigen::VectorXd::Zero(column.size());
    for (const auto& [j, lij] : coupling_[static_cast<std::size_t>(i)]) coupled += lij * s.col(j);
    value += reg_.alpha * (l(i, i) * column.squaredNorm() + 2.0 * column.dot(coupled));
  }
  value += reg_.beta * column.cwiseAbs().sum();
  return value;
}

double CodeProblem::objective(const Eigen::MatrixXd& s) const {
  double value = weighted_residual(x_, b_, s, w_);
  if (reg_.gamma > 0.0) value += reg_.gamma * (graph_->incidence - q_ * s).squaredNorm();
  if (reg_.alpha > 0.0) value += reg_.alpha * (s * graph_->laplacian).cwiseProduct(s).sum();
  return value + reg_.beta * s.cwiseAbs().sum();
}

Eigen::VectorXd s_step_column(Eigen::Index i, const CodeProblem& problem,
                              const Eigen::MatrixXd& s, CoordinateDescentOptions options) {
  if (s.rows() != problem.atoms() || s.cols() != problem.samples() || i < 0 ||
      i >= problem.samples()) {
    throw Error(ErrorCode::kShape, "S-step column: codes or index out of shape");
  }
  Eigen::MatrixXd a;
  Eigen::VectorXd h;
  problem.column_model(i, s, a, h);
  return solve_l1_quadratic(a, h, problem.reg().beta, s.col(i), options);
}

SweepResult s_step_sweep(const CodeProblem& problem, Eigen::MatrixXd s0, SweepOptions options) {
  if (s0.rows() != problem.atoms() || s0.cols() != problem.samples()) {
    throw Error(ErrorCode::kShape, "S-step sweep: codes must be r x n");
  }
  SweepResult out;
  out.codes = std::move(s0);
  out.objectives.push_back(problem.objective(out.codes));
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < problem.samples(); ++i) {
      out.codes.col(i) = s_step_column(i, problem, out.codes, options.column);
    }
    ++out.sweeps;
    const double before = out.objectives.back();
    const double after = problem.objective(out.codes);
    out.objectives.push_back(after);
    if (!std::isfinite(after)) throw Error(ErrorCode::kNumerical, "S-step objective not finite");
    if ((before - after) <= options.rel_tol * std::max(std::abs(before), 1e-300)) break;
  }
  return out;
}

Eigen::MatrixXd q_step(const Eigen::MatrixXd& incidence, const Eigen::MatrixXd& s, double tau) {
  if (incidence.cols() != s.cols()) throw Error(ErrorCode::kShape, "Q-step: I and S column counts differ");
  Eigen::MatrixXd system = s * s.transpose();
  system.diagonal().array() += tau;
  // Q^T = (S S^T + tau Id)^-1 S I^T
  return system.ldlt().solve(s * incidence.transpose()).transpose();
}

}  // namespace spsc
