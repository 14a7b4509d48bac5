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

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "graphsann/graph.hpp"
#include "graphsann/multifilter.hpp"
#include "graphsann/split.hpp"

namespace graphsann {

using RowVector = Eigen::RowVectorXd;

struct MixerConfig {
  double kappa = 1.05;
  // Synthetic nodes per minority class = ceil(zeta * training count); 0 disables synthesis.
  double zeta = 1.0;
  int riemann_steps = 50;
  // Columns of the similarity projection; 0 keeps the feature dimension.
  int projection_dim = 0;

  void validate() const;
};

struct NodePair {
  NodeId source = 0;  // minority anchor
  NodeId target = 0;  // partner from any class
  double similarity = 1.0;
};

struct SyntheticNode {
  RowVector features;
  int label = 0;
  NodePair pair;
};

/// Per-node sampling distribution for pair partners: labeled training nodes
/// weighted by log(n_c + 1) / (n_c + 1), renormalized to sum to one.
class TargetSampler {
 public:
  explicit TargetSampler(const Graph& g);

  NodeId draw(std::mt19937_64& rng);
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  std::vector<NodeId> nodes_;
  std::vector<double> probs_;
  std::discrete_distribution<std::size_t> dist_;
};

/// Normalized per-node partner probability for each class, given the
/// training count of every class (index = class id).
std::vector<double> target_probabilities(std::span<const int> class_counts);

/// ceil(zeta * n) with tolerance for representation error.
int synthetic_count(double zeta, int n);

/// For every minority class m, ceil(zeta * |train_m|) pairs with the anchor
/// uniform over the class's training nodes and the partner drawn from
/// TargetSampler. Similarity is left at 1; see score_pairs().
std::vector<NodePair> sample_pairs(const Graph& g, const ImbalanceSpec& spec,
                                   const MixerConfig& cfg, std::mt19937_64& rng);

/// 1 / (1 + ||(x_s - x_t) W||).
double pair_similarity(const RowVector& xs, const RowVector& xt, const ad::Matrix& projection);

/// mask_i = 1 iff kappa * similarity - importance_i > 0.
RowVector build_mask(double similarity, const RowVector& importance, double kappa);

/// (1 - mask) * x_s + mask * x_t, coordinate-wise.
RowVector mix_features(const RowVector& xs, const RowVector& xt, const RowVector& mask);

/// Gradient of the loss with respect to the input, evaluated at a point.
using InputGradient = std::function<RowVector(const RowVector&)>;

/// x_i * (1/S) * sum_{s=1..S} dL(s/S * x)/dx_i, a right Riemann sum from the
/// zero baseline.
RowVector integrated_gradient(const InputGradient& grad, const RowVector& x, int steps);

/// Cross-entropy gradient of node `node` with respect to its own feature row,
/// computed on its (L+1)-hop ego network in eval mode. Classifier parameters are
/// left untouched.
InputGradient classifier_input_gradient(ClassifierParams& cls, const Graph& g, NodeId node,
                                        int label);

/// Integrated-gradient masked mixup for every pair. `importance(t)` supplies
/// the attribution vector of partner t.
std::vector<SyntheticNode> mix_pairs(const Graph& g, std::span<const NodePair> pairs,
                                     const std::function<const RowVector&(NodeId)>& importance,
                                     const ad::Matrix& projection, double kappa);

/// SMOTE-style synthesis: the anchor's nearest same-class training neighbor
/// is the partner, and features are x_s + u * (x_t - x_s) with u ~ U(0, 1).
std::vector<SyntheticNode> smote_nodes(const Graph& g, const ImbalanceSpec& spec,
                                       const MixerConfig& cfg, std::mt19937_64& rng);

}  // namespace graphsann
