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

#include "graphsann/graph.hpp"

#include <algorithm>

#include "graphsann/errors.hpp"

namespace graphsann {

Graph Graph::from_edge_list(std::span<const std::pair<NodeId, NodeId>> edges, int n,
                            ad::Matrix features, std::vector<int> labels) {
  if (n < 0) throw IngestionError("negative node count");
  if (features.rows() != n) {
    throw IngestionError("feature matrix has " + std::to_string(features.rows()) +
                         " rows for " + std::to_string(n) + " nodes");
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw IngestionError("label array has " + std::to_string(labels.size()) + " entries for " +
                         std::to_string(n) + " nodes");
  }

  std::vector<int> degree(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw IngestionError("edge " + std::to_string(i) + " (" + std::to_string(u) + ", " +
                           std::to_string(v) + ") has an endpoint outside [0, " +
                           std::to_string(n) + ")");
    }
    if (u == v) continue;
    ++degree[u];
    ++degree[v];
  }

  // Bucket both directions, then sort + unique each run.
  std::vector<int> start(static_cast<std::size_t>(n) + 1, 0);
  for (int u = 0; u < n; ++u) start[u + 1] = start[u] + degree[u];
  std::vector<NodeId> raw(static_cast<std::size_t>(start[n]));
  std::vector<int> fill(start.begin(), start.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    raw[fill[u]++] = v;
    raw[fill[v]++] = u;
  }

  Graph g;
  g.n_ = n;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.targets_.reserve(raw.size());
  for (int u = 0; u < n; ++u) {
    auto first = raw.begin() + start[u];
    auto last = raw.begin() + start[u + 1];
    std::sort(first, last);
    last = std::unique(first, last);
    g.targets_.insert(g.targets_.end(), first, last);
    g.offsets_[u + 1] = static_cast<int>(g.targets_.size());
  }
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  for (int y : g.labels_) {
    if (y < kUnlabeled) throw IngestionError("negative class id " + std::to_string(y));
    g.num_classes_ = std::max(g.num_classes_, y + 1);
  }
  g.masks_ = SplitMasks{std::vector<bool>(n, false), std::vector<bool>(n, false),
                        std::vector<bool>(n, false)};
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

EdgeList Graph::to_edge_list() const {
  EdgeList out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

void Graph::set_masks(SplitMasks masks) {
  const auto n = static_cast<std::size_t>(n_);
  if (masks.train.size() != n || masks.val.size() != n || masks.test.size() != n) {
    throw ContractError("split masks must have one entry per node");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (int(masks.train[i]) + int(masks.val[i]) + int(masks.test[i]) > 1) {
      throw ContractError("node " + std::to_string(i) + " appears in more than one split");
    }
  }
  masks_ = std::move(masks);
}

double edge_homophily(const Graph& g) {
  if (!g.has_labels()) throw ContractError("edge_homophily needs labels");
  std::size_t same = 0, total = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u >= v) continue;
      ++total;
      if (g.label(u) == g.label(v)) ++same;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(same) / static_cast<double>(total);
}

double node_homophily(const Graph& g) {
  if (!g.has_labels()) throw ContractError("node_homophily needs labels");
  if (g.num_nodes() == 0) return 0.0;
  double acc = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nbrs = g.neighbors(u);
    if (nbrs.empty()) continue;
    const auto same = std::count_if(nbrs.begin(), nbrs.end(),
                                    [&](NodeId v) { return g.label(v) == g.label(u); });
    acc += static_cast<double>(same) / static_cast<double>(nbrs.size());
  }
  return acc / g.num_nodes();
}

std::vector<int> bfs_distance(const Graph& g, NodeId source, int cutoff) {
  if (source < 0 || source >= g.num_nodes()) {
    throw ContractError("bfs source " + std::to_string(source) + " out of range");
  }
  return bfs_distances(g.num_nodes(), source, cutoff, [&g](NodeId u, auto&& visit) {
    for (NodeId v : g.neighbors(u)) visit(v);
  });
}

std::vector<NodeId> k_hop_neighbors(const Graph& g, NodeId center, int h) {
  if (h < 1) throw ContractError("k_hop_neighbors needs h >= 1");
  const auto dist = bfs_distance(g, center, h);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (dist[v] <= h) out.push_back(v);
  }
  return out;
}

}  // namespace graphsann
