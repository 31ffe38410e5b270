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

#include "spsc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "spsc/error.hpp"
#include "spsc/evaluation.hpp"
#include "spsc/hypergraph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace spsc {

namespace {

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"OS",  "SC",     "LSC-G",  "LSC-H",
                                              "CSC", "SPSC-E", "SPSC-S", "SPSC-F"};
  return names;
}

void log_line(const ExperimentConfig& cfg, const std::string& message) {
  if (cfg.verbose) std::clog << "[spsc] " << message << '\n';
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_short(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

void check(const ExperimentConfig& cfg) {
  if (cfg.dictionary_size < 1) throw Error(ErrorCode::kInvalidConfig, "dictionary-size must be >= 1");
  if (cfg.repeats < 1) throw Error(ErrorCode::kInvalidConfig, "repeats must be >= 1");
  if (cfg.knn < 1) throw Error(ErrorCode::kInvalidConfig, "knn must be >= 1");
  for (double rho : cfg.rhos) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::kInvalidConfig, "rho values must be >= 0");
  }
  for (const auto& m : cfg.methods) {
    if (!is_known_method(m)) throw Error(ErrorCode::kInvalidConfig, "unknown method '" + m + "'");
  }
  validate(engine_config(cfg));
}

}  // namespace

bool is_known_method(const std::string& name) {
  const auto& names = known_methods();
  return std::find(names.begin(), names.end(), name) != names.end();
}

// --------------------------------------------------------------------------
// Configuration.
// --------------------------------------------------------------------------

json to_json(const ExperimentConfig& cfg) {
  return json{
      {"data", cfg.data},
      {"labels", cfg.labels},
      {"dataset", cfg.dataset},
      {"dictionary-size", cfg.dictionary_size},
      {"variant", to_string(cfg.variant)},
      {"spl-mode", to_string(cfg.spl_mode)},
      {"alpha", cfg.reg.alpha},
      {"beta", cfg.reg.beta},
      {"gamma", cfg.reg.gamma},
      {"mu", cfg.mu},
      {"select-fraction0", cfg.select_fraction0},
      {"max-outer-iters", cfg.max_outer_iters},
      {"tol-objective", cfg.tol_objective},
      {"tol-weight-saturation", cfg.tol_weight_saturation},
      {"q-policy", to_string(cfg.q_policy)},
      {"rho", cfg.rhos},
      {"knn", cfg.knn},
      {"repeats", cfg.repeats},
      {"seed", cfg.seed},
      {"output", cfg.output},
      {"methods", cfg.methods},
      {"tune", cfg.tune},
      {"export-graph", cfg.export_graph},
      {"snapshots", cfg.snapshots},
      {"verbose", cfg.verbose},
  };
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "data") base.data = value.get<std::string>();
      else if (key == "labels") base.labels = value.get<bool>();
      else if (key == "dataset") base.dataset = value.get<std::string>();
      else if (key == "dictionary-size") base.dictionary_size = value.get<int>();
      else if (key == "variant") base.variant = parse_variant(value.get<std::string>());
      else if (key == "spl-mode") base.spl_mode = parse_spl_mode(value.get<std::string>());
      else if (key == "alpha") base.reg.alpha = value.get<double>();
      else if (key == "beta") base.reg.beta = value.get<double>();
      else if (key == "gamma") base.reg.gamma = value.get<double>();
      else if (key == "mu") base.mu = value.get<double>();
      else if (key == "select-fraction0") base.select_fraction0 = value.get<double>();
      else if (key == "max-outer-iters") base.max_outer_iters = value.get<int>();
      else if (key == "tol-objective") base.tol_objective = value.get<double>();
      else if (key == "tol-weight-saturation") base.tol_weight_saturation = value.get<double>();
      else if (key == "q-policy") base.q_policy = parse_q_policy(value.get<std::string>());
      else if (key == "rho") base.rhos = value.get<std::vector<double>>();
      else if (key == "knn") base.knn = value.get<int>();
      else if (key == "repeats") base.repeats = value.get<int>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "output") base.output = value.get<std::string>();
      else if (key == "methods") base.methods = value.get<std::vector<std::string>>();
      else if (key == "tune") base.tune = value.get<bool>();
      else if (key == "export-graph") base.export_graph = value.get<bool>();
      else if (key == "snapshots") base.snapshots = value.get<bool>();
      else if (key == "verbose") base.verbose = value.get<bool>();
      else throw Error(ErrorCode::kInvalidConfig, "unknown configuration key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad configuration value: ") + e.what());
  }
  return base;
}

SpscConfig engine_config(const ExperimentConfig& cfg) {
  SpscConfig ec;
  ec.variant = cfg.variant;
  ec.reg = cfg.reg;
  ec.spl_mode = cfg.spl_mode;
  ec.mu = cfg.mu;
  ec.select_fraction0 = cfg.select_fraction0;
  ec.max_outer_iters = cfg.max_outer_iters;
  ec.tol_objective = cfg.tol_objective;
  ec.tol_weight_saturation = cfg.tol_weight_saturation;
  ec.seed = cfg.seed;
  ec.dictionary_size = cfg.dictionary_size;
  ec.q_policy = cfg.q_policy;
  ec.keep_weight_snapshots = false;
  return ec;
}

std::optional<SynthSpec> parse_synth_source(const std::string& data, std::uint64_t seed) {
  static const std::string prefix = "synth:";
  if (data.rfind(prefix, 0) != 0) return std::nullopt;
  SynthSpec spec;
  spec.seed = seed;
  std::istringstream stream(data.substr(prefix.size()));
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidConfig, "synth entry '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "classes") spec.classes = std::stoul(value);
      else if (key == "per-class") spec.n_per_class = std::stoul(value);
      else if (key == "m") spec.m = std::stoul(value);
      else if (key == "r-true") spec.r_true = std::stoul(value);
      else if (key == "noise-frac") spec.noise_frac = std::stod(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else throw Error(ErrorCode::kInvalidConfig, "unknown synth key '" + key + "'");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidConfig, "bad synth value '" + value + "' for " + key);
    }
  }
  return spec;
}

// --------------------------------------------------------------------------
// Data preparation.
// --------------------------------------------------------------------------

namespace {

struct Source {
  DataMatrix raw;
  Eigen::MatrixXd base_noise;  // zero for files, known corruption for synth
  std::string name;
};

Source load_source(const ExperimentConfig& cfg) {
  Source src;
  if (auto synth = parse_synth_source(cfg.data, cfg.seed)) {
    SynthBlobs blobs = synth_blobs(*synth);
    src.raw = std::move(blobs.data);
    src.base_noise = std::move(blobs.noise);
    src.name = "synth";
  } else {
    if (cfg.data.empty()) throw Error(ErrorCode::kInvalidConfig, "no data source given");
    src.raw = load_matrix_csv(cfg.data, cfg.labels);
    src.base_noise = Eigen::MatrixXd::Zero(src.raw.values.rows(), src.raw.values.cols());
    src.name = fs::path(cfg.data).stem().string();
  }
  if (!cfg.dataset.empty()) src.name = cfg.dataset;
  return src;
}

struct Prepared {
  Eigen::MatrixXd x;        // corrupted, unit columns
  std::vector<int> labels;  // empty without labels
  Eigen::VectorXd noise_level;  // per-sample mean |noise| (raw scale)
  bool has_noise = false;
};

std::uint64_t noise_seed(std::uint64_t seed, std::size_t rho_index) {
  return seed + 7919ULL * (static_cast<std::uint64_t>(rho_index) + 1ULL);
}

Prepared prepare(const Source& src, double rho, std::uint64_t seed) {
  // Corrupt raw data first, then normalize.
  const Corruption corrupted = add_gaussian_noise(src.raw, NoiseSpec{rho, seed});
  Prepared p;
  p.x = normalize_columns_unit_l2(corrupted.data).values;
  if (src.raw.labels) p.labels = *src.raw.labels;
  const Eigen::MatrixXd total = src.base_noise + corrupted.noise;
  p.noise_level = total.cwiseAbs().colwise().mean().transpose();
  p.has_noise = (total.array() != 0.0).any();
  return p;
}

int cluster_count(const std::vector<int>& labels) {
  std::vector<int> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
}

// Runs fit_spsc while streaming V snapshots into `dir` (when non-empty) and
// always leaving a trace.csv behind, even when the fit aborts.
FitResult fit_with_artifacts(const Eigen::MatrixXd& x, const Hypergraph* graph,
                             const SpscConfig& ec, const fs::path& dir, bool snapshots) {
  FitTrace streamed;
  const IterationObserver observer = [&](const TraceRecord& rec, const WeightState& v) {
    streamed.records.push_back(rec);
    if (snapshots && !dir.empty()) {
      save_matrix_csv((dir / ("V_iter_" + std::to_string(rec.iteration) + ".csv")).string(),
                      v.weights);
    }
  };
  try {
    FitResult result = fit_spsc(x, graph, ec, observer);
    if (!dir.empty()) save_trace_csv((dir / "trace.csv").string(), result.trace);
    return result;
  } catch (const FitAborted& e) {
    if (!dir.empty()) save_trace_csv((dir / "trace.csv").string(), e.trace());
    throw;
  } catch (const Error&) {
    if (!dir.empty()) save_trace_csv((dir / "trace.csv").string(), streamed);
    throw;
  }
}

void save_noise_level(const fs::path& dir, const Prepared& p) {
  save_matrix_csv((dir / "noise_magnitude.csv").string(), p.noise_level.transpose());
}

struct MethodPlan {
  bool coding = true;
  bool self_paced = false;
  bool pairwise = false;
  Variant variant = Variant::kElement;
  double alpha = 0.0;
  double gamma = 0.0;
};

MethodPlan plan_for(const std::string& method, const ExperimentConfig& cfg) {
  MethodPlan p;
  if (method == "OS") {
    p.coding = false;
  } else if (method == "SC") {
  } else if (method == "LSC-G") {
    p.alpha = cfg.reg.alpha;
    p.pairwise = true;
  } else if (method == "LSC-H") {
    p.alpha = cfg.reg.alpha;
  } else if (method == "CSC") {
    p.alpha = cfg.reg.alpha;
    p.gamma = cfg.reg.gamma;
  } else {
    p.self_paced = true;
    p.alpha = cfg.reg.alpha;
    p.gamma = cfg.reg.gamma;
    p.variant = method == "SPSC-S" ? Variant::kSample
                : method == "SPSC-F" ? Variant::kFeature
                                     : Variant::kElement;
  }
  return p;
}

struct Graphs {
  std::optional<Hypergraph> hyper;
  std::optional<Hypergraph> pairwise;
};

const Hypergraph* graph_for(const MethodPlan& plan, const Eigen::MatrixXd& x, int knn, Graphs& g) {
  if (plan.alpha == 0.0 && plan.gamma == 0.0) return nullptr;
  if (plan.pairwise) {
    if (!g.pairwise) g.pairwise = build_knn_pairwise_graph(x, knn);
    return &*g.pairwise;
  }
  if (!g.hyper) g.hyper = build_knn_hypergraph(x, knn);
  return &*g.hyper;
}

// Representation the method clusters on: codes S, or X itself for OS.
Eigen::MatrixXd represent(const std::string& method, const ExperimentConfig& cfg,
                          const Prepared& p, Graphs& graphs, const fs::path& run_dir) {
  const MethodPlan plan = plan_for(method, cfg);
  if (!plan.coding) return p.x;
  SpscConfig ec = engine_config(cfg);
  ec.reg.alpha = plan.alpha;
  ec.reg.gamma = plan.gamma;
  ec.variant = plan.variant;
  const Hypergraph* graph = graph_for(plan, p.x, cfg.knn, graphs);
  if (!plan.self_paced) return fit_csc_init(p.x, graph, ec).codes;

  if (!run_dir.empty()) {
    make_dir(run_dir);
    if (p.has_noise) save_noise_level(run_dir, p);
  }
  return fit_with_artifacts(p.x, graph, ec, run_dir, cfg.snapshots).codes;
}

ClusterResult score(const Eigen::MatrixXd& z, const ExperimentConfig& cfg, const Prepared& p) {
  return evaluate_repeated(z, cluster_count(p.labels), p.labels, cfg.repeats, cfg.seed);
}

const std::vector<double> kBetaGrid{0.005, 0.01, 0.02, 0.04, 0.08};
const std::vector<double> kAlphaGrid{0.5, 1, 2, 4, 8, 16, 32, 64};

// Sequential grid search: beta on SC, alpha on LSC-H, gamma on CSC.
ExperimentConfig tune(ExperimentConfig cfg, const Prepared& p, const fs::path& out_dir) {
  std::ostringstream table;
  table << "stage,value,acc_mean,nmi_mean\n";
  const auto search = [&](const char* stage, const std::string& method,
                          const std::vector<double>& grid, double RegularizationConfig::*field) {
    double best_value = cfg.reg.*field;
    double best_acc = -1.0;
    for (double value : grid) {
      ExperimentConfig trial = cfg;
      trial.reg.*field = value;
      Graphs graphs;
      try {
        const ClusterResult r = score(represent(method, trial, p, graphs, {}), trial, p);
        table << stage << ',' << format_short(value) << ',' << format_real(r.acc) << ','
              << format_real(r.nmi) << '\n';
        if (r.acc > best_acc) {
          best_acc = r.acc;
          best_value = value;
        }
      } catch (const Error& e) {
        log_line(cfg, std::string("tune ") + stage + "=" + format_short(value) + " failed: " + e.what());
      }
    }
    cfg.reg.*field = best_value;
    log_line(cfg, std::string("tuned ") + stage + " = " + format_short(best_value));
  };
  search("beta", "SC", kBetaGrid, &RegularizationConfig::beta);
  search("alpha", "LSC-H", kAlphaGrid, &RegularizationConfig::alpha);
  search("gamma", "CSC", kAlphaGrid, &RegularizationConfig::gamma);
  write_text(out_dir / "tune.csv", table.str());
  return cfg;
}

}  // namespace

// --------------------------------------------------------------------------
// Commands.
// --------------------------------------------------------------------------

void save_trace_csv(const std::string& path, const FitTrace& trace) {
  std::ostringstream out;
  out << "iter,lambda,objective,reconstruction,penalty,consistency,laplacian,sparsity,"
         "selected_fraction,mean_weight,min_weight,objective_before,objective_after_v,"
         "objective_after_b,objective_after_s,objective_after_q\n";
  for (const auto& r : trace.records) {
    const double row[] = {r.lambda,
                          r.terms.total(),
                          r.terms.reconstruction,
                          r.terms.penalty,
                          r.terms.consistency,
                          r.terms.laplacian,
                          r.terms.sparsity,
                          r.selected_fraction,
                          r.mean_weight,
                          r.min_weight,
                          r.objective_before,
                          r.objective_after_v,
                          r.objective_after_b,
                          r.objective_after_s,
                          r.objective_after_q};
    out << r.iteration;
    for (double v : row) out << ',' << format_real(v);
    out << '\n';
  }
  write_text(path, out.str());
}

std::string run_fit(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  check(cfg);
  // Load before touching the output directory so a bad path leaves nothing.
  const Source src = load_source(cfg);
  if (cfg.dataset.empty()) cfg.dataset = src.name;
  const double rho = cfg.rhos.empty() ? 0.0 : cfg.rhos.front();
  const Prepared p = prepare(src, rho, noise_seed(cfg.seed, 0));

  const fs::path dir(cfg.output);
  make_dir(dir);
  write_text(dir / "config-echo.json", to_json(cfg).dump(2) + "\n");
  if (p.has_noise) save_noise_level(dir, p);

  const SpscConfig ec = engine_config(cfg);
  std::optional<Hypergraph> graph;
  if (cfg.reg.alpha > 0.0 || cfg.reg.gamma > 0.0 || cfg.export_graph) {
    graph = build_knn_hypergraph(p.x, cfg.knn);
  }
  if (cfg.export_graph) {
    save_matrix_csv((dir / "I.csv").string(), graph->incidence);
    save_matrix_csv((dir / "W.csv").string(), graph->weight);
    save_matrix_csv((dir / "L.csv").string(), graph->laplacian);
  }
  const Hypergraph* gp = (cfg.reg.alpha > 0.0 || cfg.reg.gamma > 0.0) ? &*graph : nullptr;

  log_line(cfg, "fitting " + to_string(cfg.variant) + " on " + std::to_string(p.x.rows()) + "x" +
                    std::to_string(p.x.cols()) + " (rho=" + format_short(rho) + ")");
  const FitResult result = fit_with_artifacts(p.x, gp, ec, dir, cfg.snapshots);
  save_matrix_csv((dir / "B.csv").string(), result.dictionary);
  save_matrix_csv((dir / "S.csv").string(), result.codes);
  if (result.consistency.size() > 0) save_matrix_csv((dir / "Q.csv").string(), result.consistency);
  log_line(cfg, "finished after " + std::to_string(result.iterations) + " iterations" +
                    (result.converged ? " (converged)" : " (iteration cap)"));

  if (!p.labels.empty()) {
    const ClusterResult r = score(result.codes, cfg, p);
    std::ostringstream row;
    row << "dataset,variant,rho,acc_mean,nmi_mean,acc_std,nmi_std\n"
        << cfg.dataset << ",SPSC-" << static_cast<char>(std::toupper(to_string(cfg.variant)[0]))
        << ',' << format_short(rho) << ',' << format_real(r.acc) << ',' << format_real(r.nmi)
        << ',' << format_real(r.acc_std) << ',' << format_real(r.nmi_std) << '\n';
    write_text(dir / "evaluation.csv", row.str());
  }
  return dir.string();
}

std::string run_sweep(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  check(cfg);
  const Source src = load_source(cfg);
  if (cfg.dataset.empty()) cfg.dataset = src.name;
  if (!src.raw.labels) throw Error(ErrorCode::kInvalidConfig, "the sweep needs labelled data");

  const fs::path dir(cfg.output);
  make_dir(dir);
  if (cfg.tune && !cfg.rhos.empty()) {
    cfg = tune(cfg, prepare(src, cfg.rhos.front(), noise_seed(cfg.seed, 0)), dir);
  }
  write_text(dir / "config-echo.json", to_json(cfg).dump(2) + "\n");

  std::ostringstream table;
  table << "dataset,variant,rho,acc_mean,nmi_mean,acc_std,nmi_std\n";
  for (std::size_t ri = 0; ri < cfg.rhos.size(); ++ri) {
    const double rho = cfg.rhos[ri];
    const Prepared p = prepare(src, rho, noise_seed(cfg.seed, ri));
    Graphs graphs;
    for (const auto& method : cfg.methods) {
      const fs::path run_dir = dir / "runs" / (method + "_rho" + format_short(rho));
      try {
        const Eigen::MatrixXd z = represent(method, cfg, p, graphs, run_dir);
        const ClusterResult r = score(z, cfg, p);
        table << cfg.dataset << ',' << method << ',' << format_short(rho) << ','
              << format_real(r.acc) << ',' << format_real(r.nmi) << ',' << format_real(r.acc_std)
              << ',' << format_real(r.nmi_std) << '\n';
        log_line(cfg, method + " rho=" + format_short(rho) + " acc=" + format_short(r.acc) +
                          " nmi=" + format_short(r.nmi));
      } catch (const Error& e) {
        std::clog << "[spsc] " << method << " at rho=" << format_short(rho)
                  << " failed: " << e.what() << '\n';
      }
    }
  }
  const fs::path results = dir / "results.csv";
  write_text(results, table.str());
  return results.string();
}

// --------------------------------------------------------------------------
// Weight trace.
// --------------------------------------------------------------------------

std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kShape, "correlation inputs differ in length");
  if (a.size() < 2) return std::nullopt;
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double va = da.square().sum();
  const double vb = db.square().sum();
  // Relative floor so round-off in a constant vector does not count as spread.
  const auto flat = [](double var, const Eigen::VectorXd& v) {
    return var <= 1e-24 * std::max(1.0, v.squaredNorm());
  };
  if (flat(va, a) || flat(vb, b)) return std::nullopt;
  return std::clamp((da * db).sum() / std::sqrt(va * vb), -1.0, 1.0);
}

namespace {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v(a) < v(b); });
  Eigen::VectorXd ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v(order[j + 1]) == v(order[i])) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks(order[t]) = rank;
    i = j + 1;
  }
  return ranks;
}

std::map<std::string, std::size_t> header_index(const std::string& header) {
  std::map<std::string, std::size_t> idx;
  std::istringstream stream(header);
  std::string name;
  std::size_t col = 0;
  while (std::getline(stream, name, ',')) idx[name] = col++;
  return idx;
}

}  // namespace

std::optional<double> spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kShape, "correlation inputs differ in length");
  return pearson(average_ranks(a), average_ranks(b));
}

Eigen::VectorXd per_sample_weight(const Eigen::MatrixXd& stored, Eigen::Index samples) {
  if (stored.cols() == samples) return stored.colwise().mean().transpose();
  if (stored.cols() == 1) return Eigen::VectorXd::Constant(samples, stored.mean());
  throw Error(ErrorCode::kShape, "weight snapshot shape does not match the sample count");
}

std::vector<WeightTraceRow> read_weight_trace(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const fs::path trace_path = dir / "trace.csv";
  const fs::path noise_path = dir / "noise_magnitude.csv";
  if (!fs::exists(trace_path)) throw Error(ErrorCode::kMissingArtifact, "missing " + trace_path.string());
  if (!fs::exists(noise_path)) throw Error(ErrorCode::kMissingArtifact, "missing " + noise_path.string());

  const Eigen::VectorXd noise = load_matrix_csv(noise_path.string(), false).values.row(0).transpose();

  std::ifstream in(trace_path);
  std::string line;
  std::getline(in, line);
  const auto cols = header_index(line);
  if (!cols.count("iter") || !cols.count("lambda")) {
    throw Error(ErrorCode::kParse, trace_path.string() + " lacks iter/lambda columns");
  }
  std::vector<WeightTraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const DataMatrix cells = parse_matrix_csv(line, false);
    WeightTraceRow row;
    row.iteration = static_cast<int>(cells.values(0, static_cast<Eigen::Index>(cols.at("iter"))));
    row.lambda = cells.values(0, static_cast<Eigen::Index>(cols.at("lambda")));

    const fs::path snapshot = dir / ("V_iter_" + std::to_string(row.iteration) + ".csv");
    if (!fs::exists(snapshot)) throw Error(ErrorCode::kMissingArtifact, "missing " + snapshot.string());
    const Eigen::VectorXd weight =
        per_sample_weight(load_matrix_csv(snapshot.string(), false).values, noise.size());
    row.pearson = pearson(noise, weight);
    row.spearman = spearman(noise, weight);
    row.mean_weight = weight.mean();
    rows.push_back(row);
  }
  if (rows.empty()) throw Error(ErrorCode::kMissingArtifact, "no iterations recorded in " + run_dir);
  return rows;
}

std::string run_trace(const std::string& run_dir) {
  const auto rows = read_weight_trace(run_dir);
  std::ostringstream out;
  out << "iter,lambda,pearson,spearman,mean_weight\n";
  const auto cell = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.iteration << ',' << format_real(r.lambda) << ',' << cell(r.pearson) << ','
        << cell(r.spearman) << ',' << format_real(r.mean_weight) << '\n';
  }
  const fs::path path = fs::path(run_dir) / "weight_trace.csv";
  write_text(path, out.str());
  return path.string();
}

}  // namespace spsc
