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
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "graphsann/extractor.hpp"
#include "graphsann/graph.hpp"
#include "graphsann/metrics.hpp"
#include "graphsann/mixer.hpp"
#include "graphsann/multifilter.hpp"
#include "graphsann/split.hpp"

namespace graphsann {

enum class Ablation {
  kFull,
  kNoUfm,  // SMOTE with the nearest same-class neighbor instead of the feature mixer
  kNoAse,  // fixed-radius enclosing subgraphs, no relevance ranking
  kNoMse,  // mean-aggregation layers in both encoder and classifier
};

std::string to_string(Ablation a);
/// Accepts "full", "no-ufm", "no-ase", "no-mse"; throws ConfigError otherwise.
Ablation parse_ablation(const std::string& name);

struct HyperParams {
  double learning_rate = 0.001;
  double weight_decay = 5e-4;
  double dropout = 0.7;  // classifier layers
  double encoder_dropout = 0.0;
  int epochs = 2000;
  int patience = 5;          // validation checks without strict improvement before stopping
  int eval_interval = 1;     // epochs between validation checks
  double lambda = 1e-6;
  double eta = 0.5;
  int batch_size = 32;
  double zeta = 1.0;
  double xi = 0.3;
  double kappa = 1.05;
  double omega = 0.3;
  int riemann_steps = 50;
  int hops = 2;
  int density_hops = 1;
  int drnl_cap = 10;
  std::vector<int> hidden = {64, 32};
  Aggregation aggregation = Aggregation::kSymmetric;
  int warmup_epochs = 10;
  int refresh_interval = 10;
  int projection_dim = 0;
  bool random_relevance_form = false;
  // Synthetic nodes left without accepted edges are removed instead of kept isolated.
  bool drop_isolated_synthetic = false;
  // Share of edges withheld from reconstruction training (kept in the graph).
  double edge_holdout_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  MixerConfig mixer() const;
  ExtractorConfig extractor(Ablation a) const;
};

struct EpochLog {
  int epoch = 0;  // warm-up epochs are negative, counting up to -1
  double reconstruction = 0.0;
  double classification = 0.0;
  double total = 0.0;
  double val_accuracy = 0.0;
  double seconds = 0.0;
  int synthetic_nodes = 0;
  int synthetic_edges = 0;
};

struct PipelineResult {
  MetricsReport test;
  MetricsReport val;
  int best_epoch = -1;
  double best_val_accuracy = -1.0;
  int epochs_run = 0;
  std::vector<EpochLog> log;
  // Balanced graph of the best epoch: original nodes first, then synthetic ones.
  Graph balanced;
  int synthetic_nodes = 0;
  // p_e of every synthetic edge accepted into the best epoch's graph.
  std::vector<double> accepted_edge_scores;
  std::vector<std::pair<NodeId, NodeId>> held_out_edges;
  EncoderParams encoder;
  ClassifierParams classifier;
  ad::Matrix projection;
};

/// Trains edge scorer and node classifier on `g` (masks must be set) and
/// reports test metrics at the best validation epoch. Per-epoch CSV lines go
/// to `epoch_log` when given. Throws TrainingAbort on non-finite values.
PipelineResult run_pipeline(const Graph& g, const ImbalanceSpec& spec, const HyperParams& hp,
                            Ablation ablation, std::ostream* epoch_log = nullptr);

/// Original graph plus synthetic nodes and accepted synthetic edges. Synthetic
/// nodes join the training mask with their minority label.
Graph build_balanced_graph(const Graph& g, std::span<const SyntheticNode> synthetic,
                           std::span<const CandidateEdge> accepted, bool drop_isolated);

/// Edge probabilities of node pairs of `g` under a trained encoder, no gradients.
std::vector<double> score_edges(EncoderParams& enc, const Graph& g,
                                std::span<const std::pair<NodeId, NodeId>> pairs,
                                const ExtractorConfig& cfg);

/// Evaluation-mode class probabilities.
ad::Matrix predict(ClassifierParams& cls, const Graph& g);

}  // namespace graphsann
