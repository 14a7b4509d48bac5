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

#include "graphsann/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "graphsann/errors.hpp"
#include "graphsann/split.hpp"

namespace graphsann {

void ExtractorConfig::validate() const {
  if (!(xi > 0.0 && xi <= 1.0)) throw ConfigError("extractor.xi must lie in (0, 1]");
  if (hops < 1) throw ConfigError("extractor.hops must be >= 1");
  if (drnl_cap < 1) throw ConfigError("extractor.drnl_cap must be >= 1");
  if (density_hops < 1 || density_hops > hops) {
    throw ConfigError("extractor.density_hops must lie in [1, hops]");
  }
}

GraphView::GraphView(const Graph& base, RowVector synthetic_features, NodeId anchor_a,
                     NodeId anchor_b)
    : base_(&base),
      has_synthetic_(true),
      synthetic_features_(std::move(synthetic_features)),
      anchor_a_(anchor_a),
      anchor_b_(anchor_b) {
  if (synthetic_features_.size() != base.feature_dim()) {
    throw DimensionError("synthetic node has " + std::to_string(synthetic_features_.size()) +
                         " features, graph has " + std::to_string(base.feature_dim()));
  }
  const int n = base.num_nodes();
  if (anchor_a < 0 || anchor_a >= n || anchor_b < 0 || anchor_b >= n) {
    throw ContractError("synthetic anchors must be existing nodes");
  }
}

std::vector<int> GraphView::distances(NodeId source, NodeId skip_a, NodeId skip_b,
                                      int cutoff) const {
  return bfs_distances(num_nodes(), source, cutoff, [&](NodeId u, auto&& visit) {
    for_each_neighbor(u, [&](NodeId v) {
      if ((u == skip_a && v == skip_b) || (u == skip_b && v == skip_a)) return;
      visit(v);
    });
  });
}

void GraphView::copy_features(NodeId u, Eigen::Ref<RowVector> out) const {
  if (u == synthetic_id() && has_synthetic_) {
    out = synthetic_features_;
  } else {
    out = base_->features().row(u);
  }
}

std::vector<CandidateEdge> sample_candidate_edges(const Graph& g, std::span<const NodePair> pairs,
                                                  const ExtractorConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  std::vector<CandidateEdge> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto a = k_hop_neighbors(g, pairs[i].source, 1);
    const auto b = k_hop_neighbors(g, pairs[i].target, 1);
    std::vector<NodeId> pool;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(pool));
    const int count = std::max(1, floor_count(cfg.xi * static_cast<double>(pool.size())));
    std::vector<NodeId> chosen;
    std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), count, rng);
    for (NodeId t : chosen) out.push_back({static_cast<int>(i), t, pairs[i]});
  }
  return out;
}

int drnl_label(int du, int dv) {
  if (du == kInfiniteDistance || dv == kInfiniteDistance) return 0;
  const int d = du + dv;
  const int half = d / 2;
  return 1 + std::min(du, dv) + half * (half + d % 2 - 1);
}

std::vector<int> drnl_labels(std::span<const int> offsets, std::span<const int> targets,
                             int center_u, int center_v, int cap) {
  const int n = static_cast<int>(offsets.size()) - 1;
  auto neighbors = [&](NodeId u, auto&& visit) {
    for (int i = offsets[u]; i < offsets[u + 1]; ++i) visit(targets[i]);
  };
  const auto du = bfs_distances(n, center_u, kInfiniteDistance, neighbors);
  const auto dv = bfs_distances(n, center_v, kInfiniteDistance, neighbors);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) labels[k] = std::min(drnl_label(du[k], dv[k]), cap);
  labels[center_u] = 1;
  labels[center_v] = 1;
  return labels;
}

int density_budget(int num_nodes, std::size_t num_edges) {
  if (num_nodes < 2) return num_nodes;
  const double v = num_nodes;
  const double density = 2.0 * static_cast<double>(num_edges) / (v * (v - 1.0));
  return static_cast<int>(std::ceil(v * (1.0 + density) - 1e-9));
}

double relevance_score(const RowVector& mean_alpha_k, const ad::Matrix& form,
                       const RowVector& alpha_uv, int du, int dv) {
  if (du == kInfiniteDistance || dv == kInfiniteDistance) return 0.0;
  const double denom = static_cast<double>(du) + dv + std::min(du, dv);
  if (denom == 0.0) return 0.0;
  return (mean_alpha_k * form * alpha_uv.transpose())(0, 0) / denom;
}

std::vector<NodeId> select_top_m(std::span<const ScoredNode> pool, int budget, NodeId center_u,
                                 NodeId center_v) {
  std::vector<ScoredNode> others;
  for (const ScoredNode& s : pool) {
    if (s.node != center_u && s.node != center_v) others.push_back(s);
  }
  std::sort(others.begin(), others.end(), [](const ScoredNode& a, const ScoredNode& b) {
    return a.score != b.score ? a.score > b.score : a.node < b.node;
  });
  std::vector<NodeId> out = {center_u, center_v};
  const std::size_t total = std::min<std::size_t>(std::max(budget, 2), others.size() + 2);
  for (std::size_t i = 0; out.size() < total; ++i) out.push_back(others[i].node);
  std::sort(out.begin(), out.end());
  return out;
}

ad::Matrix relevance_form(const ExtractorConfig& cfg, std::mt19937_64& rng) {
  return cfg.random_relevance_form ? glorot_uniform(3, 3, rng) : ad::Matrix::Identity(3, 3);
}

Subgraph build_subgraph(const GraphView& view, NodeId u, NodeId v, std::span<const NodeId> nodes,
                        int drnl_cap) {
  Subgraph sub;
  sub.nodes = {u, v};
  for (NodeId k : nodes) {
    if (k != u && k != v) sub.nodes.push_back(k);
  }
  std::sort(sub.nodes.begin() + 2, sub.nodes.end());
  LocalCsr csr = induce(
      sub.nodes, [&view](NodeId a, auto&& visit) { view.for_each_neighbor(a, visit); }, u, v);
  sub.offsets = std::move(csr.offsets);
  sub.targets = std::move(csr.targets);
  sub.center_u = 0;
  sub.center_v = 1;
  sub.drnl = drnl_labels(sub.offsets, sub.targets, 0, 1, drnl_cap);
  sub.features.resize(sub.num_nodes(), view.base().feature_dim());
  for (int i = 0; i < sub.num_nodes(); ++i) view.copy_features(sub.nodes[i], sub.features.row(i));
  return sub;
}

std::vector<ScoredNode> relevance_scores(const GraphView& view, NodeId u, NodeId v,
                                         std::span<const NodeId> pool,
                                         std::span<const int> dist_u, std::span<const int> dist_v,
                                         const RelevanceModel& model, const ExtractorConfig& cfg) {
  const Subgraph sub = build_subgraph(view, u, v, pool, cfg.drnl_cap);
  const int n = sub.num_nodes();
  ad::Matrix mean_alpha = ad::Matrix::Constant(n, 3, 1.0 / 3.0);
  RowVector alpha_uv = RowVector::Constant(3, 1.0 / 3.0);

  if (model.encoder != nullptr && !model.encoder->layers.empty() &&
      model.encoder->layers.back().kind == LayerKind::kMultiFilter) {
    EncoderParams& enc = *model.encoder;
    ad::Tape tape;
    tape.set_grad_enabled(false);
    std::mt19937_64 unused(0);
    const MessageIndex messages = sub.messages();
    ad::Var h = tape.constant(encoder_input(sub, cfg.drnl_cap));
    const LayerForwardOptions opts{enc.omega, 0.0, false, enc.aggregation};
    for (std::size_t l = 0; l + 1 < enc.layers.size(); ++l) {
      h = layer_forward(bind(tape, enc.layers[l]), messages, h, opts, unused);
    }
    const BoundLayer last = bind(tape, enc.layers.back());
    const ChannelProjections proj = project(last, h);
    const MessageIndex closed = messages.with_self_loops();
    const ad::Matrix alpha = filter_weights(last, proj, closed.dst, closed.src).value();
    mean_alpha.setZero();
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (std::size_t e = 0; e < closed.dst.size(); ++e) {
      mean_alpha.row(closed.dst[e]) += alpha.row(static_cast<Eigen::Index>(e));
      ++count[closed.dst[e]];
    }
    for (int k = 0; k < n; ++k) mean_alpha.row(k) /= count[k];
    const int cu[] = {0}, cv[] = {1};
    alpha_uv = filter_weights(last, proj, cu, cv).value();
  }

  std::vector<ScoredNode> scored;
  scored.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const NodeId k = sub.nodes[i];
    scored.push_back({k, relevance_score(mean_alpha.row(i), model.form, alpha_uv, dist_u[k], dist_v[k])});
  }
  return scored;
}

Subgraph extract_subgraph(const GraphView& view, NodeId u, NodeId v, const ExtractorConfig& cfg,
                          const RelevanceModel& model) {
  if (u == v) throw ContractError("candidate edge endpoints must differ");
  const auto du = view.distances(u, u, v);
  const auto dv = view.distances(v, u, v);
  std::vector<NodeId> pool;
  std::vector<NodeId> dense;
  for (NodeId k = 0; k < view.num_nodes(); ++k) {
    const int d = std::min(du[k], dv[k]);
    if (d <= cfg.hops) pool.push_back(k);
    if (d <= cfg.density_hops) dense.push_back(k);
  }
  if (!cfg.adaptive) return build_subgraph(view, u, v, pool, cfg.drnl_cap);

  const LocalCsr dense_csr = induce(
      dense, [&view](NodeId a, auto&& visit) { view.for_each_neighbor(a, visit); }, u, v);
  const int budget = density_budget(static_cast<int>(dense.size()), dense_csr.targets.size() / 2);
  if (budget >= static_cast<int>(pool.size())) return build_subgraph(view, u, v, pool, cfg.drnl_cap);

  const auto scored = relevance_scores(view, u, v, pool, du, dv, model, cfg);
  const auto chosen = select_top_m(scored, budget, u, v);
  return build_subgraph(view, u, v, chosen, cfg.drnl_cap);
}

}  // namespace graphsann
