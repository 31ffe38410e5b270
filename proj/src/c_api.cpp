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

#include "spsc/spsc.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "spsc/engine.hpp"
#include "spsc/error.hpp"
#include "spsc/evaluation.hpp"
#include "spsc/experiment.hpp"
#include "spsc/hypergraph.hpp"
#include "spsc/matrix_io.hpp"

struct spsc_matrix {
  spsc::DataMatrix data;
};

struct spsc_hypergraph {
  spsc::Hypergraph graph;
};

struct spsc_fit {
  spsc::FitResult result;
};

namespace {

thread_local std::string last_error;

spsc_status status_of(spsc::ErrorCode code) {
  using spsc::ErrorCode;
  switch (code) {
    case ErrorCode::kParse: return SPSC_ERR_PARSE;
    case ErrorCode::kEmptyInput: return SPSC_ERR_EMPTY_INPUT;
    case ErrorCode::kDegenerateSample: return SPSC_ERR_DEGENERATE_SAMPLE;
    case ErrorCode::kInsufficientSamples: return SPSC_ERR_INSUFFICIENT_SAMPLES;
    case ErrorCode::kDegenerateVertex: return SPSC_ERR_DEGENERATE_VERTEX;
    case ErrorCode::kShape: return SPSC_ERR_SHAPE;
    case ErrorCode::kInvalidPace: return SPSC_ERR_INVALID_PACE;
    case ErrorCode::kInvalidConfig: return SPSC_ERR_INVALID_CONFIG;
    case ErrorCode::kNumerical: return SPSC_ERR_NUMERICAL;
    case ErrorCode::kNonFiniteObjective: return SPSC_ERR_NONFINITE_OBJECTIVE;
    case ErrorCode::kMissingArtifact: return SPSC_ERR_MISSING_ARTIFACT;
    case ErrorCode::kIo: return SPSC_ERR_IO;
  }
  return SPSC_ERR_INTERNAL;
}

spsc_status fail(spsc_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
spsc_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return SPSC_OK;
  } catch (const spsc::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SPSC_ERR_INVALID_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPSC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPSC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPSC_ERR_INTERNAL, "unknown exception");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw spsc::Error(spsc::ErrorCode::kInvalidConfig, what);
}

#define SPSC_REQUIRE_ARG(cond)                                          \
  do {                                                                  \
    if (!(cond)) return fail(SPSC_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

spsc_matrix* wrap(Eigen::MatrixXd values) {
  auto* m = new spsc_matrix;
  m->data.values = std::move(values);
  return m;
}

spsc::ExperimentConfig parse_config(const char* config_json) {
  return spsc::config_from_json(nlohmann::json::parse(config_json));
}

}  // namespace

extern "C" {

const char* spsc_version(void) { return "0.1.0"; }

const char* spsc_status_name(spsc_status status) {
  switch (status) {
    case SPSC_OK: return "OK";
    case SPSC_ERR_PARSE: return "ParseError";
    case SPSC_ERR_EMPTY_INPUT: return "EmptyInput";
    case SPSC_ERR_DEGENERATE_SAMPLE: return "DegenerateSample";
    case SPSC_ERR_INSUFFICIENT_SAMPLES: return "InsufficientSamples";
    case SPSC_ERR_DEGENERATE_VERTEX: return "DegenerateVertex";
    case SPSC_ERR_SHAPE: return "ShapeError";
    case SPSC_ERR_INVALID_PACE: return "InvalidPace";
    case SPSC_ERR_INVALID_CONFIG: return "InvalidConfig";
    case SPSC_ERR_NUMERICAL: return "NumericalError";
    case SPSC_ERR_NONFINITE_OBJECTIVE: return "NonFiniteObjective";
    case SPSC_ERR_MISSING_ARTIFACT: return "MissingArtifact";
    case SPSC_ERR_IO: return "IoError";
    case SPSC_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case SPSC_ERR_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

const char* spsc_last_error(void) { return last_error.c_str(); }

void spsc_string_free(char* s) { std::free(s); }

// ---- matrices -------------------------------------------------------------

spsc_status spsc_matrix_new(size_t rows, size_t cols, const double* column_major,
                            spsc_matrix** out) {
  SPSC_REQUIRE_ARG(out != nullptr);
  return guarded([&] {
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                                   static_cast<Eigen::Index>(cols));
    if (column_major != nullptr) {
      values = Eigen::Map<const Eigen::MatrixXd>(column_major, static_cast<Eigen::Index>(rows),
                                                 static_cast<Eigen::Index>(cols));
    }
    *out = wrap(std::move(values));
  });
}

spsc_status spsc_matrix_load_csv(const char* path, int has_labels, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(path != nullptr && out != nullptr);
  return guarded([&] { *out = new spsc_matrix{spsc::load_matrix_csv(path, has_labels != 0)}; });
}

spsc_status spsc_matrix_save_csv(const spsc_matrix* m, const char* path) {
  SPSC_REQUIRE_ARG(m != nullptr && path != nullptr);
  return guarded([&] {
    spsc::save_matrix_csv(path, m->data.values, m->data.labels ? &*m->data.labels : nullptr);
  });
}

void spsc_matrix_free(spsc_matrix* m) { delete m; }

size_t spsc_matrix_rows(const spsc_matrix* m) {
  return m != nullptr ? static_cast<size_t>(m->data.values.rows()) : 0;
}

size_t spsc_matrix_cols(const spsc_matrix* m) {
  return m != nullptr ? static_cast<size_t>(m->data.values.cols()) : 0;
}

spsc_status spsc_matrix_copy_data(const spsc_matrix* m, double* out, size_t capacity) {
  SPSC_REQUIRE_ARG(m != nullptr && out != nullptr);
  const auto size = static_cast<size_t>(m->data.values.size());
  if (capacity < size) return fail(SPSC_ERR_SHAPE, "output buffer too small");
  std::memcpy(out, m->data.values.data(), size * sizeof(double));
  return SPSC_OK;
}

size_t spsc_matrix_label_count(const spsc_matrix* m) {
  return (m != nullptr && m->data.labels) ? m->data.labels->size() : 0;
}

spsc_status spsc_matrix_copy_labels(const spsc_matrix* m, int* out, size_t capacity) {
  SPSC_REQUIRE_ARG(m != nullptr && out != nullptr);
  if (!m->data.labels) return fail(SPSC_ERR_EMPTY_INPUT, "matrix carries no labels");
  if (capacity < m->data.labels->size()) return fail(SPSC_ERR_SHAPE, "output buffer too small");
  std::copy(m->data.labels->begin(), m->data.labels->end(), out);
  return SPSC_OK;
}

spsc_status spsc_matrix_set_labels(spsc_matrix* m, const int* labels, size_t count) {
  SPSC_REQUIRE_ARG(m != nullptr && (labels != nullptr || count == 0));
  if (count != static_cast<size_t>(m->data.values.cols())) {
    return fail(SPSC_ERR_SHAPE, "one label per column required");
  }
  m->data.labels = std::vector<int>(labels, labels + count);
  return SPSC_OK;
}

spsc_status spsc_matrix_normalize(const spsc_matrix* m, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(m != nullptr && out != nullptr);
  return guarded([&] { *out = new spsc_matrix{spsc::normalize_columns_unit_l2(m->data)}; });
}

spsc_status spsc_matrix_add_noise(const spsc_matrix* m, double rho, uint64_t seed,
                                  spsc_matrix** out) {
  SPSC_REQUIRE_ARG(m != nullptr && out != nullptr);
  return guarded([&] {
    *out = new spsc_matrix{spsc::add_gaussian_noise(m->data, spsc::NoiseSpec{rho, seed}).data};
  });
}

spsc_status spsc_matrix_population_std(const spsc_matrix* m, double* out) {
  SPSC_REQUIRE_ARG(m != nullptr && out != nullptr);
  *out = spsc::population_std(m->data.values);
  return SPSC_OK;
}

spsc_status spsc_synth_blobs(size_t n_per_class, size_t classes, size_t m, size_t r_true,
                             double noise_frac, uint64_t seed, spsc_matrix** out,
                             size_t* corrupted, size_t capacity, size_t* corrupted_count) {
  SPSC_REQUIRE_ARG(out != nullptr);
  return guarded([&] {
    spsc::SynthBlobs blobs =
        spsc::synth_blobs(spsc::SynthSpec{n_per_class, classes, m, r_true, noise_frac, seed});
    if (corrupted != nullptr) {
      for (size_t i = 0; i < blobs.corrupted.size() && i < capacity; ++i) corrupted[i] = blobs.corrupted[i];
    }
    if (corrupted_count != nullptr) *corrupted_count = blobs.corrupted.size();
    *out = new spsc_matrix{std::move(blobs.data)};
  });
}

// ---- hypergraph -----------------------------------------------------------

spsc_status spsc_hypergraph_knn(const spsc_matrix* x, int k, spsc_hypergraph** out) {
  SPSC_REQUIRE_ARG(x != nullptr && out != nullptr);
  return guarded([&] {
    *out = new spsc_hypergraph{spsc::build_knn_hypergraph(x->data.values, k)};
  });
}

spsc_status spsc_hypergraph_from_incidence(const spsc_matrix* incidence, const double* edge_weights,
                                           spsc_hypergraph** out) {
  SPSC_REQUIRE_ARG(incidence != nullptr && out != nullptr);
  return guarded([&] {
    spsc::Hypergraph h;
    h.incidence = incidence->data.values;
    h.edge_weights = edge_weights != nullptr
                         ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(edge_weights, h.incidence.rows()))
                         : Eigen::VectorXd::Ones(h.incidence.rows());
    *out = new spsc_hypergraph{spsc::compute_weight_and_laplacian(std::move(h))};
  });
}

spsc_status spsc_hypergraph_incidence(const spsc_hypergraph* h, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(h != nullptr && out != nullptr);
  return guarded([&] { *out = wrap(h->graph.incidence); });
}

spsc_status spsc_hypergraph_weight(const spsc_hypergraph* h, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(h != nullptr && out != nullptr);
  return guarded([&] { *out = wrap(h->graph.weight); });
}

spsc_status spsc_hypergraph_laplacian(const spsc_hypergraph* h, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(h != nullptr && out != nullptr);
  return guarded([&] { *out = wrap(h->graph.laplacian); });
}

void spsc_hypergraph_free(spsc_hypergraph* h) { delete h; }

// ---- fitting --------------------------------------------------------------

void spsc_fit_options_init(spsc_fit_options* options) {
  if (options == nullptr) return;
  const spsc::SpscConfig d;
  options->variant = SPSC_VARIANT_ELEMENT;
  options->spl_mode = SPSC_SPL_SOFT;
  options->dictionary_size = d.dictionary_size;
  options->alpha = d.reg.alpha;
  options->beta = d.reg.beta;
  options->gamma = d.reg.gamma;
  options->mu = d.mu;
  options->select_fraction0 = d.select_fraction0;
  options->max_outer_iters = d.max_outer_iters;
  options->tol_objective = d.tol_objective;
  options->tol_weight_saturation = d.tol_weight_saturation;
  options->seed = d.seed;
  options->freeze_consistency = 0;
  options->lambda0_scale = d.lambda0_scale;
}

spsc_status spsc_fit_run(const spsc_matrix* x, const spsc_hypergraph* graph,
                         const spsc_fit_options* options, spsc_fit** out) {
  SPSC_REQUIRE_ARG(x != nullptr && options != nullptr && out != nullptr);
  return guarded([&] {
    spsc::SpscConfig cfg;
    switch (options->variant) {
      case SPSC_VARIANT_SAMPLE: cfg.variant = spsc::Variant::kSample; break;
      case SPSC_VARIANT_FEATURE: cfg.variant = spsc::Variant::kFeature; break;
      case SPSC_VARIANT_ELEMENT: cfg.variant = spsc::Variant::kElement; break;
      default: require(false, "unknown variant");
    }
    require(options->spl_mode == SPSC_SPL_SOFT || options->spl_mode == SPSC_SPL_HARD,
            "unknown spl mode");
    cfg.spl_mode = options->spl_mode == SPSC_SPL_HARD ? spsc::SplMode::kHard : spsc::SplMode::kSoft;
    cfg.dictionary_size = options->dictionary_size;
    cfg.reg = {options->alpha, options->beta, options->gamma};
    cfg.mu = options->mu;
    cfg.select_fraction0 = options->select_fraction0;
    cfg.max_outer_iters = options->max_outer_iters;
    cfg.tol_objective = options->tol_objective;
    cfg.tol_weight_saturation = options->tol_weight_saturation;
    cfg.seed = options->seed;
    cfg.q_policy = options->freeze_consistency ? spsc::QPolicy::kFrozen : spsc::QPolicy::kRidge;
    cfg.lambda0_scale = options->lambda0_scale;
    cfg.keep_weight_snapshots = false;
    *out = new spsc_fit{spsc::fit_spsc(x->data.values, graph ? &graph->graph : nullptr, cfg)};
  });
}

spsc_status spsc_fit_dictionary(const spsc_fit* fit, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(fit != nullptr && out != nullptr);
  return guarded([&] { *out = wrap(fit->result.dictionary); });
}

spsc_status spsc_fit_codes(const spsc_fit* fit, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(fit != nullptr && out != nullptr);
  return guarded([&] { *out = wrap(fit->result.codes); });
}

spsc_status spsc_fit_weights(const spsc_fit* fit, spsc_matrix** out) {
  SPSC_REQUIRE_ARG(fit != nullptr && out != nullptr);
  return guarded([&] { *out = wrap(fit->result.weights.weights); });
}

size_t spsc_fit_iterations(const spsc_fit* fit) {
  return fit != nullptr ? static_cast<size_t>(fit->result.iterations) : 0;
}

int spsc_fit_converged(const spsc_fit* fit) {
  return (fit != nullptr && fit->result.converged) ? 1 : 0;
}

spsc_status spsc_fit_trace_entry(const spsc_fit* fit, size_t iteration, spsc_trace_entry* out) {
  SPSC_REQUIRE_ARG(fit != nullptr && out != nullptr);
  const auto& records = fit->result.trace.records;
  if (iteration >= records.size()) return fail(SPSC_ERR_SHAPE, "iteration out of range");
  const auto& r = records[iteration];
  *out = spsc_trace_entry{r.lambda,           r.terms.total(),    r.terms.reconstruction,
                          r.terms.penalty,    r.terms.consistency, r.terms.laplacian,
                          r.terms.sparsity,   r.selected_fraction, r.mean_weight,
                          r.min_weight};
  return SPSC_OK;
}

void spsc_fit_free(spsc_fit* fit) { delete fit; }

// ---- evaluation -----------------------------------------------------------

spsc_status spsc_clustering_accuracy(const int* pred, const int* truth, size_t n, double* out) {
  SPSC_REQUIRE_ARG(pred != nullptr && truth != nullptr && out != nullptr);
  return guarded([&] {
    *out = spsc::clustering_accuracy(std::vector<int>(pred, pred + n), std::vector<int>(truth, truth + n));
  });
}

spsc_status spsc_nmi(const int* pred, const int* truth, size_t n, double* out) {
  SPSC_REQUIRE_ARG(pred != nullptr && truth != nullptr && out != nullptr);
  return guarded([&] {
    *out = spsc::nmi(std::vector<int>(pred, pred + n), std::vector<int>(truth, truth + n));
  });
}

spsc_status spsc_evaluate_kmeans(const spsc_matrix* points, int k, const int* labels, size_t n,
                                 int repeats, uint64_t seed, double* acc, double* nmi) {
  SPSC_REQUIRE_ARG(points != nullptr && labels != nullptr && acc != nullptr && nmi != nullptr);
  return guarded([&] {
    const auto r = spsc::evaluate_repeated(points->data.values, k,
                                           std::vector<int>(labels, labels + n), repeats, seed);
    *acc = r.acc;
    *nmi = r.nmi;
  });
}

// ---- experiments ----------------------------------------------------------

spsc_status spsc_default_config_json(char** out) {
  SPSC_REQUIRE_ARG(out != nullptr);
  return guarded([&] { *out = duplicate(spsc::to_json(spsc::ExperimentConfig{}).dump(2)); });
}

spsc_status spsc_normalize_config_json(const char* config_json, char** out) {
  SPSC_REQUIRE_ARG(config_json != nullptr && out != nullptr);
  return guarded([&] { *out = duplicate(spsc::to_json(parse_config(config_json)).dump(2)); });
}

spsc_status spsc_run_fit(const char* config_json, char** run_dir) {
  SPSC_REQUIRE_ARG(config_json != nullptr);
  return guarded([&] {
    const std::string dir = spsc::run_fit(parse_config(config_json));
    if (run_dir != nullptr) *run_dir = duplicate(dir);
  });
}

spsc_status spsc_run_sweep(const char* config_json, char** results_path) {
  SPSC_REQUIRE_ARG(config_json != nullptr);
  return guarded([&] {
    const std::string path = spsc::run_sweep(parse_config(config_json));
    if (results_path != nullptr) *results_path = duplicate(path);
  });
}

spsc_status spsc_run_trace(const char* run_dir, char** csv_path) {
  SPSC_REQUIRE_ARG(run_dir != nullptr);
  return guarded([&] {
    const std::string path = spsc::run_trace(run_dir);
    if (csv_path != nullptr) *csv_path = duplicate(path);
  });
}

}  // extern "C"
