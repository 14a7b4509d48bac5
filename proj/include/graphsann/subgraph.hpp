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

#include <algorithm>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphsann/autodiff.hpp"
#include "graphsann/graph.hpp"

namespace graphsann {

/// Directed message list (src -> dst) over a CSR adjacency.
struct MessageIndex {
  int num_nodes = 0;
  std::vector<int> dst;
  std::vector<int> src;

  static MessageIndex from_csr(int num_nodes, std::span<const int> offsets,
                               std::span<const NodeId> targets);
  static MessageIndex from_graph(const Graph& g) {
    return from_csr(g.num_nodes(), g.offsets(), g.targets());
  }
  // Same messages plus one self message per node, appended at the end.
  MessageIndex with_self_loops() const;
};

/// Enclosing subgraph of a target node pair, in local indices.
struct Subgraph {
  // Ids in the extraction graph's node space, local index = position.
  std::vector<NodeId> nodes;
  // Induced adjacency without the target pair's own edge.
  std::vector<int> offsets{0};
  std::vector<int> targets;
  int center_u = 0;
  int center_v = 1;
  // Double-radius structural label per node (already clamped to the cap).
  std::vector<int> drnl;
  // Raw attributes, one row per node.
  ad::Matrix features;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  std::size_t num_edges() const { return targets.size() / 2; }
  MessageIndex messages() const { return MessageIndex::from_csr(num_nodes(), offsets, targets); }
  /// num_nodes x (cap + 1) one-hot encoding of `drnl`.
  ad::Matrix drnl_onehot(int cap) const;
};

struct LocalCsr {
  std::vector<int> offsets{0};
  std::vector<int> targets;
};

/// Induced adjacency over `nodes` (local index = position), optionally
/// leaving out the undirected edge {skip_a, skip_b}. `for_each_neighbor(u,
/// visit)` enumerates neighbors in the caller's node-id space.
template <class ForEachNeighbor>
LocalCsr induce(std::span<const NodeId> nodes, ForEachNeighbor&& for_each_neighbor,
                NodeId skip_a = -1, NodeId skip_b = -1) {
  std::unordered_map<NodeId, int> local;
  local.reserve(nodes.size() * 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) local.emplace(nodes[i], static_cast<int>(i));
  LocalCsr csr;
  csr.offsets.reserve(nodes.size() + 1);
  for (const NodeId u : nodes) {
    const std::size_t begin = csr.targets.size();
    for_each_neighbor(u, [&](NodeId v) {
      if ((u == skip_a && v == skip_b) || (u == skip_b && v == skip_a)) return;
      if (auto it = local.find(v); it != local.end()) csr.targets.push_back(it->second);
    });
    std::sort(csr.targets.begin() + static_cast<std::ptrdiff_t>(begin), csr.targets.end());
    csr.offsets.push_back(static_cast<int>(csr.targets.size()));
  }
  return csr;
}

}  // namespace graphsann
