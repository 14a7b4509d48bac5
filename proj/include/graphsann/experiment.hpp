/*
 * Copyright 2026 The GraphSANN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphsann/config.hpp"
#include "graphsann/graph.hpp"
#include "graphsann/metrics.hpp"

namespace graphsann {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

Summary summarize(std::span<const double> values);

struct SeedRun {
  std::uint64_t seed = 0;
  MetricsReport test;
  int best_epoch = -1;
  int epochs_run = 0;
  double seconds = 0.0;
};

struct RunReport {
  std::string config;  // config echo; re-running it reproduces the report
  std::vector<SeedRun> runs;
  Summary accuracy;
  Summary macro_f1;
  Summary macro_auc;
  double edge_homophily = 0.0;
  double node_homophily = 0.0;
  std::vector<int> class_histogram;
  double seconds = 0.0;
};

// One point of a sweep or ablation suite.
struct SweepRow {
  std::string parameter;  // config key path, or "ablation"
  std::string value;
  RunReport report;
};

struct RunOptions {
  std::ostream* progress = nullptr;
  // Per-seed epoch CSVs are written here when set.
  std::optional<std::filesystem::path> epoch_log_dir;
  // Best-epoch parameters, one checkpoint_seed<k>.bin per seed, when set.
  std::optional<std::filesystem::path> checkpoint_dir;
};

/// The dataset directory or the generated SBM named by the config.
Graph load_graph(const ExperimentConfig& cfg);

/// Runs the pipeline once per seed; each seed draws its own split.
RunReport run_experiment(const ExperimentConfig& cfg, const Graph& g, const RunOptions& opts = {});

/// Re-runs the experiment with `key` (a config key path) set to each value.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const Graph& g, const std::string& key,
                            std::span<const std::string> values, const RunOptions& opts = {});
/// im_ratio from 0.1 to 0.6.
std::vector<SweepRow> sweep_im_ratio(const ExperimentConfig& cfg, const Graph& g,
                                     const RunOptions& opts = {});
/// Default grids: train.dropout 0.1..0.9, extractor.xi {0.01, 0.1, 0.3, 0.5, 0.7, 0.9}.
std::vector<std::string> default_grid(const std::string& key);
/// full, no-ufm, no-ase, no-mse.
std::vector<SweepRow> ablation_suite(const ExperimentConfig& cfg, const Graph& g,
                                     const RunOptions& opts = {});

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);
std::string sweep_to_json(std::span<const SweepRow> rows);
std::vector<SweepRow> sweep_from_json(const std::string& text);

/// One row per seed, metrics as percentages with two decimals.
std::string metrics_csv(const RunReport& report);
std::string metrics_csv(std::span<const SweepRow> rows);
/// One row per sweep point with mean and std percentages.
std::string sweep_csv(std::span<const SweepRow> rows);
/// Whitespace-separated columns for gnuplot: index, value, then mean/std pairs.
std::string plot_columns(std::span<const SweepRow> rows);

/// results.json and metrics.csv (plus sweep.csv for sweeps) under `dir`.
/// Throws IoError when the directory or a file cannot be written.
void emit_report(const RunReport& report, const std::filesystem::path& dir);
void emit_sweep(std::span<const SweepRow> rows, const std::filesystem::path& dir);

}  // namespace graphsann
