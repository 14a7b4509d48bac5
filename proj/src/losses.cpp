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

#include "graphsann/losses.hpp"

#include "graphsann/errors.hpp"

namespace graphsann {

ad::Var reconstruction_loss(ad::Var positive_scores, ad::Var negative_scores) {
  if (positive_scores.cols() != 1 || negative_scores.cols() != 1) {
    throw DimensionError("reconstruction_loss expects column vectors of scores");
  }
  ad::Var loss = ad::sum_all(ad::square(ad::add_scalar(positive_scores, -1.0)));
  if (negative_scores.rows() > 0) loss = ad::add(loss, ad::sum_all(ad::square(negative_scores)));
  return loss;
}

NodeId sample_non_neighbor(const Graph& g, NodeId v, std::mt19937_64& rng, int max_tries) {
  std::uniform_int_distribution<NodeId> pick(0, g.num_nodes() - 1);
  for (int i = 0; i < max_tries; ++i) {
    const NodeId m = pick(rng);
    if (m != v && !g.has_edge(v, m)) return m;
  }
  throw SamplingError("no non-neighbor found for node " + std::to_string(v) + " after " +
                      std::to_string(max_tries) + " tries");
}

ReconstructionBatch with_negatives(const Graph& g, std::span<const std::pair<NodeId, NodeId>> positives,
                                   std::mt19937_64& rng) {
  ReconstructionBatch batch;
  batch.positives.assign(positives.begin(), positives.end());
  for (const auto& [u, v] : positives) batch.negatives.emplace_back(v, sample_non_neighbor(g, v, rng));
  return batch;
}

ad::Var score_pairs(ad::Tape& tape, EncoderParams& enc, const GraphView& view,
                    std::span<const std::pair<NodeId, NodeId>> pairs, const ExtractorConfig& cfg,
                    const RelevanceModel& relevance, bool training, std::mt19937_64& rng) {
  if (pairs.empty()) return tape.constant(ad::Matrix(0, 1));
  std::vector<ad::Var> scores;
  scores.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    const Subgraph sub = extract_subgraph(view, u, v, cfg, relevance);
    scores.push_back(encode_subgraph(tape, enc, sub, cfg.drnl_cap, training, rng));
  }
  return ad::concat_rows(scores);
}

ad::Var classification_loss(ad::Var probs, std::span<const int> rows, std::span<const int> labels) {
  if (rows.size() != labels.size()) throw DimensionError("classification_loss: rows/labels length mismatch");
  if (rows.empty()) throw ContractError("classification_loss over an empty node set");
  return ad::negate(ad::mean_all(ad::log_clamped(ad::pick(probs, rows, labels), kLogFloor)));
}

ad::Var total_loss(ad::Var reconstruction, ad::Var classification, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
  return ad::add(ad::scale(reconstruction, 1.0 - lambda), ad::scale(classification, lambda));
}

}  // namespace graphsann
