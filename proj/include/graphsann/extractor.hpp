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

#include "graphsann/graph.hpp"
#include "graphsann/mixer.hpp"
#include "graphsann/multifilter.hpp"
#include "graphsann/subgraph.hpp"

namespace graphsann {

struct ExtractorConfig {
  double xi = 0.3;    // candidate sampling ratio
  int hops = 2;       // radius of the candidate pool
  int drnl_cap = 10;  // largest structural label; one-hot width is cap + 1
  // Radius of the enclosing subgraph whose density sets the node budget M.
  // Setting it equal to `hops` measures density on the pool itself.
  int density_hops = 1;
  // false: keep the whole fixed-radius pool without relevance ranking.
  bool adaptive = true;
  // Relevance bilinear form: identity when false, a fixed random 3x3 otherwise.
  bool random_relevance_form = false;

  void validate() const;
};

struct CandidateEdge {
  int synthetic = 0;  // index into the synthetic node list
  NodeId target = 0;  // original node
  NodePair pair;
};

/// A graph with at most one provisional synthetic node, id = base.num_nodes(),
/// wired by unit edges to both anchors of its pair.
class GraphView {
 public:
  explicit GraphView(const Graph& base) : base_(&base) {}
  GraphView(const Graph& base, RowVector synthetic_features, NodeId anchor_a, NodeId anchor_b);

  const Graph& base() const { return *base_; }
  int num_nodes() const { return base_->num_nodes() + (has_synthetic_ ? 1 : 0); }
  bool has_synthetic() const { return has_synthetic_; }
  NodeId synthetic_id() const { return base_->num_nodes(); }

  template <class Visit>
  void for_each_neighbor(NodeId u, Visit&& visit) const {
    if (u == synthetic_id()) {
      visit(anchor_a_);
      if (anchor_b_ != anchor_a_) visit(anchor_b_);
      return;
    }
    for (NodeId v : base_->neighbors(u)) visit(v);
    if (has_synthetic_ && (u == anchor_a_ || u == anchor_b_)) visit(synthetic_id());
  }

  /// Unweighted distances from `source` with the undirected edge
  /// {skip_a, skip_b} removed; kInfiniteDistance where unreachable.
  std::vector<int> distances(NodeId source, NodeId skip_a, NodeId skip_b,
                             int cutoff = kInfiniteDistance) const;

  void copy_features(NodeId u, Eigen::Ref<RowVector> out) const;

 private:
  const Graph* base_;
  bool has_synthetic_ = false;
  RowVector synthetic_features_;
  NodeId anchor_a_ = -1;
  NodeId anchor_b_ = -1;
};

/// For every synthetic node, max(1, floor(xi * |N1(s) u N1(t)|)) targets drawn
/// without replacement from the union of the anchors' closed neighborhoods.
std::vector<CandidateEdge> sample_candidate_edges(const Graph& g, std::span<const NodePair> pairs,
                                                  const ExtractorConfig& cfg, std::mt19937_64& rng);

/// Double-radius label from the distances to the two centers. Infinite
/// distances give 0; the caller assigns 1 to the centers themselves.
int drnl_label(int du, int dv);

/// DRNL labels of a local subgraph, measured inside it; clamped to cap.
std::vector<int> drnl_labels(std::span<const int> offsets, std::span<const int> targets,
                             int center_u, int center_v, int cap);

/// ceil(V * (1 + 2E / (V (V - 1)))), the density-based node budget.
int density_budget(int num_nodes, std::size_t num_edges);

/// f_rel(k) = (alpha_k^T W alpha_uv) / (d(k,v) + d(k,u) + min(d(k,v), d(k,u))).
/// Zero when either distance is infinite.
double relevance_score(const RowVector& mean_alpha_k, const ad::Matrix& form,
                       const RowVector& alpha_uv, int du, int dv);

struct ScoredNode {
  NodeId node;
  double score;
};

/// The two centers plus the highest-scoring other nodes, min(budget, pool)
/// nodes in total. Ties go to the smaller node id. Output is sorted by id.
std::vector<NodeId> select_top_m(std::span<const ScoredNode> pool, int budget, NodeId center_u,
                                 NodeId center_v);

/// Relevance scoring state: the subgraph encoder read without gradients and
/// the fixed bilinear form.
struct RelevanceModel {
  EncoderParams* encoder = nullptr;  // nullptr: uniform filter profiles
  ad::Matrix form = ad::Matrix::Identity(3, 3);
};

ad::Matrix relevance_form(const ExtractorConfig& cfg, std::mt19937_64& rng);

/// Per-node relevance scores of `pool` for the pair (u, v).
std::vector<ScoredNode> relevance_scores(const GraphView& view, NodeId u, NodeId v,
                                         std::span<const NodeId> pool,
                                         std::span<const int> dist_u, std::span<const int> dist_v,
                                         const RelevanceModel& model, const ExtractorConfig& cfg);

/// Enclosing subgraph of (u, v) in `view`, without the edge {u, v}. Centers
/// occupy local indices 0 and 1.
Subgraph extract_subgraph(const GraphView& view, NodeId u, NodeId v, const ExtractorConfig& cfg,
                          const RelevanceModel& model);

/// Builds a Subgraph over an explicit node set (centers first).
Subgraph build_subgraph(const GraphView& view, NodeId u, NodeId v, std::span<const NodeId> nodes,
                        int drnl_cap);

}  // namespace graphsann
