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
#include <string>
#include <vector>

#include "graphsann/autodiff.hpp"
#include "graphsann/graph.hpp"
#include "graphsann/subgraph.hpp"

namespace graphsann {

enum class LayerKind {
  kMultiFilter,      // low-pass / high-pass / identity channels with per-edge gates
  kMeanAggregation,  // uniform mean over the closed neighborhood, GCN style
};

/**
 * One message-passing layer.
 *
 * Weight matrices are stored input-major (in_dim x out_dim) so a layer maps
 * row features H (n x in_dim) to H * W.
 *
 * Multi-filter gates for a message k -> u:
 *   a_low   = sigmoid(g_low . [h_u W_low || h_k W_low])
 *   a_high  = sigmoid(g_high . (-h_k W_high))
 *   a_ident = sigmoid(g_ident . (h_u W_ident))
 * normalized with a softmax over the three channels. The output is
 *   h'_u = omega * r(h_u) + sum_k sum_c alpha_c(u,k) * relu(h_k W_c)
 * where r is the identity when dims agree and the W_ident projection
 * otherwise.
 */
// How gated neighbor messages are combined at the receiving node.
enum class Aggregation {
  kSum,        // plain sum over neighbors
  kSymmetric,  // each message scaled by 1 / sqrt(deg(u) deg(k))
};

struct Layer {
  static Layer multi_filter(const std::string& prefix, int in_dim, int out_dim,
                            std::mt19937_64& rng);
  static Layer mean_aggregation(const std::string& prefix, int in_dim, int out_dim,
                                std::mt19937_64& rng);

  std::vector<ad::Parameter*> parameters();

  LayerKind kind = LayerKind::kMultiFilter;
  int in_dim = 0;
  int out_dim = 0;

  ad::Parameter w_low, w_high, w_identity;  // multi-filter
  ad::Parameter g_low;                      // 2*out_dim x 1: [self half; neighbor half]
  ad::Parameter g_high, g_identity;         // out_dim x 1
  ad::Parameter weight, bias;               // mean aggregation
};

// Layer parameters recorded on a tape for one forward pass.
struct BoundLayer {
  const Layer* layer = nullptr;
  ad::Var w_low, w_high, w_identity, g_low_self, g_low_nbr, g_high, g_identity;
  ad::Var weight, bias;
};

BoundLayer bind(ad::Tape& tape, Layer& layer);

// Per-node channel projections h W_low, h W_high, h W_ident.
struct ChannelProjections {
  ad::Var low, high, identity;
};

ChannelProjections project(const BoundLayer& layer, ad::Var h);

/// Normalized (low, high, identity) weights for every message dst <- src:
/// an E x 3 matrix whose rows lie on the probability simplex.
ad::Var filter_weights(const BoundLayer& layer, const ChannelProjections& proj,
                       std::span<const int> dst, std::span<const int> src);

/// Filter weights of a single pair (u, k); h_u and h_k are 1 x in_dim.
ad::Var filter_coefficients(ad::Tape& tape, Layer& layer, ad::Var h_u, ad::Var h_k);

struct LayerForwardOptions {
  double omega = 0.3;
  double dropout = 0.0;
  bool training = false;
  Aggregation aggregation = Aggregation::kSymmetric;
};

/// 1 / sqrt(deg(dst) deg(src)) for every message, degrees counted in `messages`.
ad::Matrix symmetric_edge_norm(const MessageIndex& messages);

ad::Var layer_forward(const BoundLayer& layer, const MessageIndex& messages, ad::Var h,
                      const LayerForwardOptions& options, std::mt19937_64& rng);

struct EncoderParams {
  /// L layers with the given widths, then W_pool over the concatenated layer
  /// outputs. Matrices get Glorot-uniform init; gates and W_pool start at zero.
  static EncoderParams init(int in_dim, std::span<const int> hidden, LayerKind kind, double omega,
                            std::mt19937_64& rng);

  std::vector<ad::Parameter*> parameters();
  int in_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }

  std::vector<Layer> layers;
  ad::Parameter w_pool;  // (d_1 + ... + d_L) x 1
  double omega = 0.3;
  double dropout = 0.0;
  Aggregation aggregation = Aggregation::kSymmetric;
};

struct ClassifierParams {
  static ClassifierParams init(int in_dim, std::span<const int> hidden, int num_classes,
                               LayerKind kind, double omega, double dropout,
                               std::mt19937_64& rng);

  std::vector<ad::Parameter*> parameters();
  int num_classes() const { return static_cast<int>(head_w.cols()); }

  std::vector<Layer> layers;
  ad::Parameter head_w;  // d_L x C
  ad::Parameter head_b;  // 1 x C
  double omega = 0.3;
  double dropout = 0.7;
  Aggregation aggregation = Aggregation::kSymmetric;
};

/// Runs every encoder layer over `h0`; returns the L layer outputs in order.
std::vector<ad::Var> encoder_layers(ad::Tape& tape, EncoderParams& enc,
                                    const MessageIndex& messages, ad::Var h0, bool training,
                                    std::mt19937_64& rng);

/// Encoder input for a subgraph: raw attributes concatenated with the DRNL one-hot.
ad::Matrix encoder_input(const Subgraph& sub, int drnl_cap);

/// Edge-existence probability of a subgraph: sigmoid of the mean over nodes of
/// W_pool applied to the concatenated layer outputs. Throws ContractError on
/// an empty subgraph.
ad::Var encode_subgraph(ad::Tape& tape, EncoderParams& enc, const Subgraph& sub, int drnl_cap,
                        bool training, std::mt19937_64& rng);

/// Row-softmax class probabilities for every node of the message graph.
ad::Var classifier_forward(ad::Tape& tape, ClassifierParams& cls, const MessageIndex& messages,
                           ad::Var h0, bool training, std::mt19937_64& rng);

ad::Var classify_nodes(ad::Tape& tape, ClassifierParams& cls, const Graph& g, bool training,
                       std::mt19937_64& rng);

/// Indices of p_e values strictly above eta.
std::vector<std::size_t> apply_threshold(std::span<const double> p_e, double eta);

ad::Matrix glorot_uniform(int fan_in, int fan_out, std::mt19937_64& rng);

}  // namespace graphsann
