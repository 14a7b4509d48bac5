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

#include "graphsann/mixer.hpp"

#include <cmath>
#include <limits>

#include "graphsann/errors.hpp"
#include "graphsann/subgraph.hpp"

namespace graphsann {

void MixerConfig::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("mixer.kappa must be > 0");
  if (!(zeta >= 0.0)) throw ConfigError("mixer.zeta must be >= 0");
  if (riemann_steps < 1) throw ConfigError("mixer.riemann_steps must be >= 1");
  if (projection_dim < 0) throw ConfigError("mixer.projection_dim must be >= 0");
}

int synthetic_count(double zeta, int n) {
  return static_cast<int>(std::ceil(zeta * static_cast<double>(n) - 1e-9));
}

std::vector<double> target_probabilities(std::span<const int> class_counts) {
  double z = 0.0;
  for (int n : class_counts) {
    if (n > 0) z += std::log(static_cast<double>(n) + 1.0);
  }
  std::vector<double> raw(class_counts.size(), 0.0);
  double mass = 0.0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    const double n = class_counts[c];
    if (n <= 0) continue;
    raw[c] = std::log(n + 1.0) / ((n + 1.0) * z);
    mass += raw[c] * n;
  }
  for (double& p : raw) p /= mass;
  return raw;
}

TargetSampler::TargetSampler(const Graph& g) {
  const auto by_class = train_nodes_by_class(g);
  std::vector<int> counts;
  for (const auto& nodes : by_class) counts.push_back(static_cast<int>(nodes.size()));
  const std::vector<double> per_node = target_probabilities(counts);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    for (NodeId v : by_class[c]) {
      nodes_.push_back(v);
      probs_.push_back(per_node[c]);
    }
  }
  if (nodes_.empty()) throw SamplingError("no labeled training nodes to pair with");
  dist_ = std::discrete_distribution<std::size_t>(probs_.begin(), probs_.end());
}

NodeId TargetSampler::draw(std::mt19937_64& rng) { return nodes_[dist_(rng)]; }

std::vector<NodePair> sample_pairs(const Graph& g, const ImbalanceSpec& spec,
                                   const MixerConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const auto by_class = train_nodes_by_class(g);
  std::vector<NodePair> pairs;
  if (cfg.zeta == 0.0) return pairs;
  TargetSampler targets(g);
  for (int m : spec.minority_classes) {
    const auto& anchors = by_class.at(static_cast<std::size_t>(m));
    if (anchors.empty()) {
      throw SamplingError("minority class " + std::to_string(m) + " has no training nodes");
    }
    std::uniform_int_distribution<std::size_t> pick(0, anchors.size() - 1);
    const int count = synthetic_count(cfg.zeta, static_cast<int>(anchors.size()));
    for (int i = 0; i < count; ++i) {
      NodePair p;
      p.source = anchors[pick(rng)];
      p.target = targets.draw(rng);
      pairs.push_back(p);
    }
  }
  return pairs;
}

double pair_similarity(const RowVector& xs, const RowVector& xt, const ad::Matrix& projection) {
  if (xs.size() != xt.size() || xs.size() != projection.rows()) {
    throw DimensionError("pair_similarity: features of length " + std::to_string(xs.size()) +
                         "/" + std::to_string(xt.size()) + " against a " +
                         std::to_string(projection.rows()) + "x" +
                         std::to_string(projection.cols()) + " projection");
  }
  const double dist = ((xs - xt) * projection).norm();
  return 1.0 / (1.0 + dist);
}

RowVector build_mask(double similarity, const RowVector& importance, double kappa) {
  const double threshold = kappa * similarity;
  RowVector mask(importance.size());
  for (Eigen::Index i = 0; i < importance.size(); ++i) {
    mask[i] = threshold - importance[i] > 0.0 ? 1.0 : 0.0;
  }
  return mask;
}

RowVector mix_features(const RowVector& xs, const RowVector& xt, const RowVector& mask) {
  if (xs.size() != xt.size() || xs.size() != mask.size()) {
    throw DimensionError("mix_features: length mismatch");
  }
  RowVector out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = mask[i] != 0.0 ? xt[i] : xs[i];
  return out;
}

RowVector integrated_gradient(const InputGradient& grad, const RowVector& x, int steps) {
  if (steps < 1) throw ConfigError("integrated_gradient needs at least one step");
  RowVector total = RowVector::Zero(x.size());
  for (int s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps);
    const RowVector g = grad(t * x);
    if (g.size() != x.size()) throw DimensionError("input gradient has the wrong length");
    total += g;
  }
  return x.cwiseProduct(total) / static_cast<double>(steps);
}

InputGradient classifier_input_gradient(ClassifierParams& cls, const Graph& g, NodeId node,
                                        int label) {
  // One hop beyond the receptive field keeps the degrees seen by degree-scaled messages exact.
  const int hops = std::max(1, static_cast<int>(cls.layers.size())) + 1;
  std::vector<NodeId> ego = k_hop_neighbors(g, node, hops);
  const LocalCsr csr = induce(ego, [&g](NodeId u, auto&& visit) {
    for (NodeId v : g.neighbors(u)) visit(v);
  });
  const MessageIndex messages = MessageIndex::from_csr(static_cast<int>(ego.size()), csr.offsets, csr.targets);
  const int center = static_cast<int>(std::lower_bound(ego.begin(), ego.end(), node) - ego.begin());
  ad::Matrix context(static_cast<Eigen::Index>(ego.size()), g.feature_dim());
  for (std::size_t i = 0; i < ego.size(); ++i) context.row(static_cast<Eigen::Index>(i)) = g.features().row(ego[i]);
  context.row(center).setZero();

  return [&cls, messages, context = std::move(context), center, label](const RowVector& x) {
    ad::Tape tape;
    tape.set_parameters_frozen(true);
    std::mt19937_64 unused(0);
    const ad::Var row = tape.variable(ad::Matrix(x));
    const int at[] = {center};
    const ad::Var h0 = ad::add(tape.constant(context), ad::scatter_add_rows(row, at, context.rows()));
    const ad::Var probs = classifier_forward(tape, cls, messages, h0, false, unused);
    const int cols[] = {label};
    const ad::Var loss = ad::negate(ad::log_clamped(ad::pick(probs, at, cols), 1e-12));
    tape.backward(loss);
    return RowVector(row.grad());
  };
}

std::vector<SyntheticNode> mix_pairs(const Graph& g, std::span<const NodePair> pairs,
                                     const std::function<const RowVector&(NodeId)>& importance,
                                     const ad::Matrix& projection, double kappa) {
  std::vector<SyntheticNode> out;
  out.reserve(pairs.size());
  for (const NodePair& p : pairs) {
    const RowVector xs = g.features().row(p.source);
    const RowVector xt = g.features().row(p.target);
    SyntheticNode node;
    node.pair = p;
    node.pair.similarity = pair_similarity(xs, xt, projection);
    node.features = mix_features(xs, xt, build_mask(node.pair.similarity, importance(p.target), kappa));
    node.label = g.label(p.source);
    out.push_back(std::move(node));
  }
  return out;
}

std::vector<SyntheticNode> smote_nodes(const Graph& g, const ImbalanceSpec& spec,
                                       const MixerConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const auto by_class = train_nodes_by_class(g);
  std::vector<SyntheticNode> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int m : spec.minority_classes) {
    const auto& members = by_class.at(static_cast<std::size_t>(m));
    if (members.empty()) {
      throw SamplingError("minority class " + std::to_string(m) + " has no training nodes");
    }
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const int count = synthetic_count(cfg.zeta, static_cast<int>(members.size()));
    for (int i = 0; i < count; ++i) {
      const NodeId s = members[pick(rng)];
      NodeId nearest = s;
      double best = std::numeric_limits<double>::infinity();
      for (NodeId t : members) {
        if (t == s) continue;
        const double d = (g.features().row(s) - g.features().row(t)).squaredNorm();
        if (d < best) {
          best = d;
          nearest = t;
        }
      }
      const RowVector xs = g.features().row(s);
      const RowVector xt = g.features().row(nearest);
      SyntheticNode node;
      node.pair = {s, nearest, 1.0};
      node.features = xs + unit(rng) * (xt - xs);
      node.label = m;
      out.push_back(std::move(node));
    }
  }
  return out;
}

}  // namespace graphsann
