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

// Command-line driver: `spsc fit`, `spsc sweep`, `spsc trace`.
//
// Configuration is layered: built-in defaults, then the JSON file given by
// --config, then explicit flags. SPSC_SEED supplies the seed when neither the
// file nor the flags set one.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spsc/spsc.h"

namespace {

using nlohmann::json;

// Flag values land in `overrides` only when the user actually passed them.
struct Flags {
  json overrides = json::object();
  std::vector<std::function<void()>> commit;
  std::string config_path;
};

template <typename T>
void add_value(CLI::App* app, Flags& flags, const std::string& key, const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = app->add_option("--" + key, *value, help);
  flags.commit.push_back([&flags, key, value, opt] {
    if (opt->count() > 0) flags.overrides[key] = *value;
  });
}

void add_switch(CLI::App* app, Flags& flags, const std::string& key, const std::string& help) {
  auto value = std::make_shared<bool>(false);
  CLI::Option* opt = app->add_flag("--" + key + ",!--no-" + key, *value, help);
  flags.commit.push_back([&flags, key, value, opt] {
    if (opt->count() > 0) flags.overrides[key] = *value;
  });
}

void add_experiment_flags(CLI::App* app, Flags& flags) {
  app->add_option("--config", flags.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  add_value<std::string>(app, flags, "data", "CSV data file (features x samples) or synth:key=value,...");
  add_switch(app, flags, "labels", "Last CSV row holds integer class labels");
  add_value<std::string>(app, flags, "dataset", "Dataset name written to results");
  add_value<int>(app, flags, "dictionary-size", "Number of dictionary atoms");
  add_value<std::string>(app, flags, "variant", "sample, feature or element");
  add_value<std::string>(app, flags, "spl-mode", "soft or hard");
  add_value<double>(app, flags, "alpha", "Laplacian regularization weight");
  add_value<double>(app, flags, "beta", "l1 sparsity weight");
  add_value<double>(app, flags, "gamma", "Hyperedge consistency weight");
  add_value<double>(app, flags, "mu", "Pace growth factor (> 1)");
  add_value<double>(app, flags, "select-fraction0", "Fraction of entries selected at the first iteration");
  add_value<int>(app, flags, "max-outer-iters", "Outer iteration limit");
  add_value<double>(app, flags, "tol-objective", "Relative objective change tolerance");
  add_value<double>(app, flags, "tol-weight-saturation", "Weight saturation tolerance");
  add_value<std::string>(app, flags, "q-policy", "frozen or ridge");
  add_value<std::vector<double>>(app, flags, "rho", "Noise levels");
  add_value<int>(app, flags, "knn", "Neighbours per hyperedge");
  add_value<int>(app, flags, "repeats", "k-means repetitions");
  add_value<std::uint64_t>(app, flags, "seed", "Random seed");
  add_value<std::string>(app, flags, "output", "Output directory");
  add_value<std::vector<std::string>>(app, flags, "methods", "Methods to sweep");
  add_switch(app, flags, "tune", "Grid-search beta, alpha and gamma before sweeping");
  add_switch(app, flags, "export-graph", "Write I.csv, W.csv and L.csv");
  add_switch(app, flags, "snapshots", "Write V_iter_<t>.csv per iteration");
  add_switch(app, flags, "verbose", "Progress messages on stderr");
}

json effective_config(Flags& flags) {
  json config = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw std::runtime_error("cannot read " + flags.config_path);
    config = json::parse(in);
    if (!config.is_object()) throw std::runtime_error("configuration file must hold a JSON object");
  }
  for (auto& commit : flags.commit) commit();
  config.update(flags.overrides);
  if (!config.contains("seed")) {
    if (const char* env = std::getenv("SPSC_SEED"); env != nullptr && *env != '\0') {
      config["seed"] = std::stoull(env);
    }
  }
  return config;
}

int report(spsc_status status) {
  std::fprintf(stderr, "spsc: %s: %s\n", spsc_status_name(status), spsc_last_error());
  return 1;
}

// Runs one experiment entry point and prints the path it produced.
int run_with(spsc_status (*entry)(const char*, char**), Flags& flags) {
  json config;
  try {
    config = effective_config(flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "spsc: %s\n", e.what());
    return 2;
  }
  char* path = nullptr;
  const spsc_status status = entry(config.dump().c_str(), &path);
  if (status != SPSC_OK) return report(status);
  std::printf("%s\n", path);
  spsc_string_free(path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-paced sparse coding experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spsc_version());

  Flags fit_flags;
  CLI::App* fit = app.add_subcommand("fit", "Fit one model and write B.csv, S.csv, Q.csv, trace.csv");
  add_experiment_flags(fit, fit_flags);

  Flags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "Noise sweep over methods; writes results.csv");
  add_experiment_flags(sweep, sweep_flags);

  bool print_config = false;
  Flags config_flags;
  CLI::App* config = app.add_subcommand("config", "Print the effective configuration as JSON");
  add_experiment_flags(config, config_flags);
  config->add_flag("--defaults", print_config, "Ignore flags and print built-in defaults");

  std::string run_dir;
  CLI::App* trace = app.add_subcommand("trace", "Noise/weight correlation per iteration of a run");
  trace->add_option("run-dir", run_dir, "Run directory written by fit or sweep")->required();

  CLI11_PARSE(app, argc, argv);

  if (fit->parsed()) return run_with(spsc_run_fit, fit_flags);
  if (sweep->parsed()) return run_with(spsc_run_sweep, sweep_flags);
  if (config->parsed()) {
    char* text = nullptr;
    spsc_status status;
    if (print_config) {
      status = spsc_default_config_json(&text);
    } else {
      json merged;
      try {
        merged = effective_config(config_flags);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "spsc: %s\n", e.what());
        return 2;
      }
      status = spsc_normalize_config_json(merged.dump().c_str(), &text);
    }
    if (status != SPSC_OK) return report(status);
    std::printf("%s\n", text);
    spsc_string_free(text);
    return 0;
  }
  char* path = nullptr;
  const spsc_status status = spsc_run_trace(run_dir.c_str(), &path);
  if (status != SPSC_OK) return report(status);
  std::printf("%s\n", path);
  spsc_string_free(path);
  return 0;
}
