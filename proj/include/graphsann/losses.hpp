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

#include <random>
#include <span>
#include <utility>
#include <vector>

#include "graphsann/autodiff.hpp"
#include "graphsann/extractor.hpp"
#include "graphsann/graph.hpp"
#include "graphsann/multifilter.hpp"

namespace graphsann {

inline constexpr double kLogFloor = 1e-12;

/// sum (p_pos - 1)^2 + sum p_neg^2 over column vectors of edge probabilities.
ad::Var reconstruction_loss(ad::Var positive_scores, ad::Var negative_scores);

/// A node m != v with no edge (v, m), uniform over all nodes by rejection.
/// Throws SamplingError after `max_tries` rejections.
NodeId sample_non_neighbor(const Graph& g, NodeId v, std::mt19937_64& rng, int max_tries = 100);

struct ReconstructionBatch {
  std::vector<std::pair<NodeId, NodeId>> positives;
  std::vector<std::pair<NodeId, NodeId>> negatives;  // (v, m) paired with positive (u, v)
};

/// Pairs every positive (u, v) with a sampled negative (v, m).
ReconstructionBatch with_negatives(const Graph& g, std::span<const std::pair<NodeId, NodeId>> positives,
                                   std::mt19937_64& rng);

/// Encodes the enclosing subgraph of every pair and stacks the k
/// probabilities into a k x 1 column.
ad::Var score_pairs(ad::Tape& tape, EncoderParams& enc, const GraphView& view,
                    std::span<const std::pair<NodeId, NodeId>> pairs, const ExtractorConfig& cfg,
                    const RelevanceModel& relevance, bool training, std::mt19937_64& rng);

/// Mean negative log-likelihood of `labels` at `rows`, log argument clamped at 1e-12.
ad::Var classification_loss(ad::Var probs, std::span<const int> rows, std::span<const int> labels);

/// (1 - lambda) * reconstruction + lambda * classification, lambda in (0, 1].
ad::Var total_loss(ad::Var reconstruction, ad::Var classification, double lambda);

}  // namespace graphsann
