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
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphsann/autodiff.hpp"

namespace graphsann {

using NodeId = int;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();
inline constexpr int kUnlabeled = -1;

struct SplitMasks {
  std::vector<bool> train;
  std::vector<bool> val;
  std::vector<bool> test;
};

/**
 * Undirected attributed graph in CSR form.
 *
 * Storage invariants: every edge is present in both directions, neighbor runs
 * are sorted ascending, there are no duplicates and no self-loops. Labels are
 * dense class ids 0..C-1 or kUnlabeled.
 */
class Graph {
 public:
  Graph() = default;

  /// Symmetrizes, deduplicates and drops self-loops. Throws IngestionError on
  /// an endpoint outside [0, n), naming the offending edge index.
  static Graph from_edge_list(std::span<const std::pair<NodeId, NodeId>> edges, int n,
                              ad::Matrix features, std::vector<int> labels = {});

  int num_nodes() const { return n_; }
  // Undirected edge count.
  std::size_t num_edges() const { return targets_.size() / 2; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  int degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const;
  // Canonical list with u < v, sorted.
  EdgeList to_edge_list() const;

  const std::vector<int>& offsets() const { return offsets_; }
  const std::vector<NodeId>& targets() const { return targets_; }

  const ad::Matrix& features() const { return features_; }
  int feature_dim() const { return static_cast<int>(features_.cols()); }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(NodeId u) const { return labels_[u]; }
  int num_classes() const { return num_classes_; }

  // Raw class names in dense-id order, when ingested from files.
  const std::vector<std::string>& class_names() const { return class_names_; }
  void set_class_names(std::vector<std::string> names) { class_names_ = std::move(names); }

  const SplitMasks& masks() const { return masks_; }
  /// Throws ContractError unless the masks have length n and are pairwise disjoint.
  void set_masks(SplitMasks masks);

 private:
  int n_ = 0;
  std::vector<int> offsets_{0};
  std::vector<NodeId> targets_;
  ad::Matrix features_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::vector<std::string> class_names_;
  SplitMasks masks_;
};

/// Fraction of undirected edges joining same-label endpoints.
double edge_homophily(const Graph& g);
/// Mean over nodes of the same-label neighbor fraction; isolated nodes count 0.
double node_homophily(const Graph& g);

/**
 * Hop-limited BFS over any adjacency. `for_each_neighbor(u, f)` must call
 * f(v) for every neighbor v of u. Nodes farther than `cutoff` hops (or
 * unreachable) get kInfiniteDistance.
 */
template <class ForEachNeighbor>
std::vector<int> bfs_distances(int n, NodeId source, int cutoff, ForEachNeighbor&& for_each_neighbor) {
  std::vector<int> dist(static_cast<std::size_t>(n), kInfiniteDistance);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    if (dist[u] >= cutoff) continue;
    for_each_neighbor(u, [&](NodeId v) {
      if (dist[v] == kInfiniteDistance) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    });
  }
  return dist;
}

std::vector<int> bfs_distance(const Graph& g, NodeId source, int cutoff = kInfiniteDistance);

/// Nodes within h hops of center, center included, sorted ascending.
std::vector<NodeId> k_hop_neighbors(const Graph& g, NodeId center, int h);

}  // namespace graphsann
