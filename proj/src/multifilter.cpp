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

#include "graphsann/multifilter.hpp"

#include <cmath>

#include "graphsann/errors.hpp"

namespace graphsann {

using ad::Matrix;
using ad::Var;

Matrix glorot_uniform(int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Layer Layer::multi_filter(const std::string& prefix, int in_dim, int out_dim,
                          std::mt19937_64& rng) {
  if (in_dim < 1 || out_dim < 1) throw DimensionError("layer dims must be positive");
  Layer l;
  l.kind = LayerKind::kMultiFilter;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.w_low = ad::Parameter(prefix + ".w_low", glorot_uniform(in_dim, out_dim, rng));
  l.w_high = ad::Parameter(prefix + ".w_high", glorot_uniform(in_dim, out_dim, rng));
  l.w_identity = ad::Parameter(prefix + ".w_identity", glorot_uniform(in_dim, out_dim, rng));
  l.g_low = ad::Parameter(prefix + ".g_low", Matrix::Zero(2 * out_dim, 1));
  l.g_high = ad::Parameter(prefix + ".g_high", Matrix::Zero(out_dim, 1));
  l.g_identity = ad::Parameter(prefix + ".g_identity", Matrix::Zero(out_dim, 1));
  return l;
}

Layer Layer::mean_aggregation(const std::string& prefix, int in_dim, int out_dim,
                              std::mt19937_64& rng) {
  if (in_dim < 1 || out_dim < 1) throw DimensionError("layer dims must be positive");
  Layer l;
  l.kind = LayerKind::kMeanAggregation;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.weight = ad::Parameter(prefix + ".weight", glorot_uniform(in_dim, out_dim, rng));
  l.bias = ad::Parameter(prefix + ".bias", Matrix::Zero(1, out_dim));
  return l;
}

std::vector<ad::Parameter*> Layer::parameters() {
  if (kind == LayerKind::kMeanAggregation) return {&weight, &bias};
  return {&w_low, &w_high, &w_identity, &g_low, &g_high, &g_identity};
}

BoundLayer bind(ad::Tape& tape, Layer& layer) {
  BoundLayer b;
  b.layer = &layer;
  if (layer.kind == LayerKind::kMeanAggregation) {
    b.weight = tape.param(layer.weight);
    b.bias = tape.param(layer.bias);
    return b;
  }
  b.w_low = tape.param(layer.w_low);
  b.w_high = tape.param(layer.w_high);
  b.w_identity = tape.param(layer.w_identity);
  Var g_low = tape.param(layer.g_low);
  b.g_low_self = ad::row_slice(g_low, 0, layer.out_dim);
  b.g_low_nbr = ad::row_slice(g_low, layer.out_dim, layer.out_dim);
  b.g_high = tape.param(layer.g_high);
  b.g_identity = tape.param(layer.g_identity);
  return b;
}

namespace {

void check_input(const Layer& layer, Var h) {
  if (h.cols() != layer.in_dim) {
    throw DimensionError("layer expects " + std::to_string(layer.in_dim) +
                         " input features, got " + std::to_string(h.cols()));
  }
}

}  // namespace

Matrix symmetric_edge_norm(const MessageIndex& messages) {
  std::vector<double> degree(static_cast<std::size_t>(messages.num_nodes), 0.0);
  for (int d : messages.dst) degree[d] += 1.0;
  Matrix out(static_cast<Eigen::Index>(messages.dst.size()), 1);
  for (std::size_t e = 0; e < messages.dst.size(); ++e) {
    out(static_cast<Eigen::Index>(e), 0) = 1.0 / std::sqrt(degree[messages.dst[e]] * degree[messages.src[e]]);
  }
  return out;
}

ChannelProjections project(const BoundLayer& layer, Var h) {
  check_input(*layer.layer, h);
  if (layer.layer->kind != LayerKind::kMultiFilter) {
    throw ContractError("channel projections exist only for multi-filter layers");
  }
  return {ad::matmul(h, layer.w_low), ad::matmul(h, layer.w_high),
          ad::matmul(h, layer.w_identity)};
}

Var filter_weights(const BoundLayer& layer, const ChannelProjections& proj,
                   std::span<const int> dst, std::span<const int> src) {
  if (dst.size() != src.size()) throw DimensionError("filter_weights: dst/src length mismatch");
  const Var s_low_self = ad::matmul(proj.low, layer.g_low_self);
  const Var s_low_nbr = ad::matmul(proj.low, layer.g_low_nbr);
  const Var s_high = ad::matmul(proj.high, layer.g_high);
  const Var s_ident = ad::matmul(proj.identity, layer.g_identity);

  const Var a_low =
      ad::sigmoid(ad::add(ad::gather_rows(s_low_self, dst), ad::gather_rows(s_low_nbr, src)));
  const Var a_high = ad::sigmoid(ad::negate(ad::gather_rows(s_high, src)));
  const Var a_ident = ad::sigmoid(ad::gather_rows(s_ident, dst));
  const Var stacked[] = {a_low, a_high, a_ident};
  return ad::softmax_rows(ad::concat_cols(stacked));
}

Var filter_coefficients(ad::Tape& tape, Layer& layer, Var h_u, Var h_k) {
  if (h_u.rows() != 1 || h_k.rows() != 1) throw DimensionError("filter_coefficients takes row vectors");
  if (h_u.cols() != layer.in_dim || h_k.cols() != layer.in_dim) {
    throw DimensionError("filter_coefficients: feature dims do not match layer input " +
                         std::to_string(layer.in_dim));
  }
  const BoundLayer b = bind(tape, layer);
  const Var pair[] = {h_u, h_k};
  const Var h = ad::concat_rows(pair);
  const int dst[] = {0};
  const int src[] = {1};
  return filter_weights(b, project(b, h), dst, src);
}

Var layer_forward(const BoundLayer& layer, const MessageIndex& messages, Var h,
                  const LayerForwardOptions& options, std::mt19937_64& rng) {
  check_input(*layer.layer, h);
  if (h.rows() != messages.num_nodes) {
    throw DimensionError("layer input has " + std::to_string(h.rows()) + " rows for " +
                         std::to_string(messages.num_nodes) + " nodes");
  }
  ad::Tape& tape = h.tape();
  const int n = messages.num_nodes;

  if (layer.layer->kind == LayerKind::kMeanAggregation) {
    const MessageIndex closed = messages.with_self_loops();
    Matrix inv_count = Matrix::Zero(n, 1);
    for (int d : closed.dst) inv_count(d, 0) += 1.0;
    inv_count = inv_count.cwiseInverse();
    Matrix weights(static_cast<Eigen::Index>(closed.dst.size()), 1);
    for (std::size_t e = 0; e < closed.dst.size(); ++e) {
      weights(static_cast<Eigen::Index>(e), 0) = inv_count(closed.dst[e], 0);
    }
    const Var hw = ad::matmul(h, layer.weight);
    const Var mean = ad::edge_aggregate(hw, tape.constant(std::move(weights)), closed.dst, closed.src, n);
    const Var out = ad::relu(ad::add_row_broadcast(mean, layer.bias));
    return ad::dropout(out, options.dropout, options.training, rng);
  }

  const ChannelProjections proj = project(layer, h);
  const Var alpha = filter_weights(layer, proj, messages.dst, messages.src);
  const auto& dst = messages.dst;
  const auto& src = messages.src;
  auto channel = [&](int c) {
    const Var w = ad::column(alpha, c);
    if (options.aggregation == Aggregation::kSum) return w;
    return ad::hadamard(w, tape.constant(symmetric_edge_norm(messages)));
  };
  const Var low = ad::edge_aggregate(ad::relu(proj.low), channel(0), dst, src, n);
  const Var high = ad::edge_aggregate(ad::relu(proj.high), channel(1), dst, src, n);
  const Var ident = ad::edge_aggregate(ad::relu(proj.identity), channel(2), dst, src, n);
  const Var aggregated = ad::add(ad::add(low, high), ident);

  const Var residual = layer.layer->in_dim == layer.layer->out_dim ? h : proj.identity;
  const Var out = ad::add(ad::scale(residual, options.omega), aggregated);
  return ad::dropout(out, options.dropout, options.training, rng);
}

// --- encoder ----------------------------------------------------------------

namespace {

std::vector<Layer> make_layers(const std::string& prefix, int in_dim, std::span<const int> hidden,
                               LayerKind kind, std::mt19937_64& rng) {
  if (hidden.empty()) throw ConfigError("at least one hidden layer is required");
  std::vector<Layer> layers;
  int prev = in_dim;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const std::string name = prefix + ".layer" + std::to_string(l + 1);
    layers.push_back(kind == LayerKind::kMultiFilter
                         ? Layer::multi_filter(name, prev, hidden[l], rng)
                         : Layer::mean_aggregation(name, prev, hidden[l], rng));
    prev = hidden[l];
  }
  return layers;
}

}  // namespace

EncoderParams EncoderParams::init(int in_dim, std::span<const int> hidden, LayerKind kind,
                                  double omega, std::mt19937_64& rng) {
  EncoderParams enc;
  enc.layers = make_layers("encoder", in_dim, hidden, kind, rng);
  int total = 0;
  for (int d : hidden) total += d;
  enc.w_pool = ad::Parameter("encoder.w_pool", Matrix::Zero(total, 1));
  enc.omega = omega;
  return enc;
}

std::vector<ad::Parameter*> EncoderParams::parameters() {
  std::vector<ad::Parameter*> out;
  for (Layer& l : layers) {
    for (ad::Parameter* p : l.parameters()) out.push_back(p);
  }
  out.push_back(&w_pool);
  return out;
}

ClassifierParams ClassifierParams::init(int in_dim, std::span<const int> hidden, int num_classes,
                                        LayerKind kind, double omega, double dropout,
                                        std::mt19937_64& rng) {
  if (num_classes < 1) throw ConfigError("classifier needs at least one class");
  ClassifierParams cls;
  cls.layers = make_layers("classifier", in_dim, hidden, kind, rng);
  cls.head_w = ad::Parameter("classifier.head_w", glorot_uniform(hidden.back(), num_classes, rng));
  cls.head_b = ad::Parameter("classifier.head_b", Matrix::Zero(1, num_classes));
  cls.omega = omega;
  cls.dropout = dropout;
  return cls;
}

std::vector<ad::Parameter*> ClassifierParams::parameters() {
  std::vector<ad::Parameter*> out;
  for (Layer& l : layers) {
    for (ad::Parameter* p : l.parameters()) out.push_back(p);
  }
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

std::vector<Var> encoder_layers(ad::Tape& tape, EncoderParams& enc, const MessageIndex& messages,
                                Var h0, bool training, std::mt19937_64& rng) {
  std::vector<Var> outs;
  Var h = h0;
  const LayerForwardOptions opts{enc.omega, enc.dropout, training, enc.aggregation};
  for (Layer& layer : enc.layers) {
    h = layer_forward(bind(tape, layer), messages, h, opts, rng);
    outs.push_back(h);
  }
  return outs;
}

Matrix encoder_input(const Subgraph& sub, int drnl_cap) {
  Matrix h0(sub.num_nodes(), sub.features.cols() + drnl_cap + 1);
  h0.leftCols(sub.features.cols()) = sub.features;
  h0.rightCols(drnl_cap + 1) = sub.drnl_onehot(drnl_cap);
  return h0;
}

Var encode_subgraph(ad::Tape& tape, EncoderParams& enc, const Subgraph& sub, int drnl_cap,
                    bool training, std::mt19937_64& rng) {
  if (sub.num_nodes() == 0) throw ContractError("encode_subgraph on an empty subgraph");
  const Var h0 = tape.constant(encoder_input(sub, drnl_cap));
  const std::vector<Var> outs = encoder_layers(tape, enc, sub.messages(), h0, training, rng);
  const Var h = ad::concat_cols(outs);
  const Var scores = ad::matmul(h, tape.param(enc.w_pool));
  return ad::sigmoid(ad::mean_all(scores));
}

Var classifier_forward(ad::Tape& tape, ClassifierParams& cls, const MessageIndex& messages, Var h0,
                       bool training, std::mt19937_64& rng) {
  Var h = h0;
  const LayerForwardOptions opts{cls.omega, cls.dropout, training, cls.aggregation};
  for (Layer& layer : cls.layers) h = layer_forward(bind(tape, layer), messages, h, opts, rng);
  const Var logits = ad::add_row_broadcast(ad::matmul(h, tape.param(cls.head_w)),
                                           tape.param(cls.head_b));
  return ad::softmax_rows(logits);
}

Var classify_nodes(ad::Tape& tape, ClassifierParams& cls, const Graph& g, bool training,
                   std::mt19937_64& rng) {
  return classifier_forward(tape, cls, MessageIndex::from_graph(g), tape.constant(g.features()),
                            training, rng);
}

std::vector<std::size_t> apply_threshold(std::span<const double> p_e, double eta) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < p_e.size(); ++i) {
    if (p_e[i] > eta) kept.push_back(i);
  }
  return kept;
}

}  // namespace graphsann
