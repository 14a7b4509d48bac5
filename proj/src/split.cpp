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

#include "graphsann/split.hpp"

#include <algorithm>
#include <cmath>

#include "graphsann/errors.hpp"

namespace graphsann {

int floor_count(double x) { return static_cast<int>(std::floor(x + 1e-9)); }

bool ImbalanceSpec::is_minority(int c) const {
  return std::find(minority_classes.begin(), minority_classes.end(), c) != minority_classes.end();
}

void ImbalanceSpec::validate(int num_classes) const {
  if (!(im_ratio > 0.0 && im_ratio <= 1.0)) {
    throw ConfigError("im_ratio must lie in (0, 1], got " + std::to_string(im_ratio));
  }
  if (majority_train_count < 1) throw ConfigError("majority_train_count must be >= 1");
  for (int c : minority_classes) {
    if (c < 0 || c >= num_classes) {
      throw ConfigError("minority class " + std::to_string(c) + " not in [0, " +
                        std::to_string(num_classes) + ")");
    }
  }
}

namespace {

std::vector<std::vector<NodeId>> nodes_by_class(const Graph& g) {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(g.num_classes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.label(v) != kUnlabeled) out[g.label(v)].push_back(v);
  }
  return out;
}

[[noreturn]] void infeasible(int c, std::size_t have, int need, const char* what) {
  throw SplitError("class " + std::to_string(c) + " has " + std::to_string(have) +
                   " nodes left but the " + what + " quota needs " + std::to_string(need));
}

}  // namespace

SplitMasks make_imbalanced_split(const Graph& g, const ImbalanceSpec& spec, SplitSetting setting,
                                 const EvalSplit& eval, std::mt19937_64& rng) {
  if (!g.has_labels()) throw ContractError("make_imbalanced_split needs labels");
  spec.validate(g.num_classes());
  const int n = g.num_nodes();
  const int num_classes = g.num_classes();
  SplitMasks masks{std::vector<bool>(n, false), std::vector<bool>(n, false),
                   std::vector<bool>(n, false)};

  auto by_class = nodes_by_class(g);
  for (auto& nodes : by_class) std::shuffle(nodes.begin(), nodes.end(), rng);

  // Per-class training quota and the pools left for evaluation.
  std::vector<int> train_quota(num_classes, 0);
  if (setting == SplitSetting::kSemiSupervised) {
    for (int c = 0; c < num_classes; ++c) {
      train_quota[c] = spec.is_minority(c)
                           ? floor_count(spec.majority_train_count * spec.im_ratio)
                           : spec.majority_train_count;
    }
  } else {
    int largest_majority = 0;
    for (int c = 0; c < num_classes; ++c) {
      train_quota[c] = floor_count(0.7 * static_cast<double>(by_class[c].size()));
      if (!spec.is_minority(c)) largest_majority = std::max(largest_majority, train_quota[c]);
    }
    for (int c = 0; c < num_classes; ++c) {
      if (spec.is_minority(c)) {
        train_quota[c] = std::min(train_quota[c], floor_count(spec.im_ratio * largest_majority));
      }
    }
  }

  for (int c = 0; c < num_classes; ++c) {
    if (by_class[c].empty()) continue;
    if (train_quota[c] < 1) infeasible(c, by_class[c].size(), train_quota[c], "training (>= 1)");
    if (static_cast<std::size_t>(train_quota[c]) > by_class[c].size()) {
      infeasible(c, by_class[c].size(), train_quota[c], "training");
    }
  }

  // Evaluation counts.
  std::vector<int> val_count(num_classes, 0), test_count(num_classes, 0);
  if (eval.mode == EvalSplit::Mode::kRatio) {
    for (int c = 0; c < num_classes; ++c) {
      const int rest = static_cast<int>(by_class[c].size()) - train_quota[c];
      if (setting == SplitSetting::kSupervised) {
        val_count[c] = floor_count(0.1 * static_cast<double>(by_class[c].size()));
        test_count[c] = floor_count(0.2 * static_cast<double>(by_class[c].size()));
      } else {
        val_count[c] = static_cast<int>(std::lround(eval.val_fraction * rest));
        test_count[c] = rest - val_count[c];
      }
    }
  } else {
    int val = eval.val_per_class, test = eval.test_per_class;
    if (val == 0 && test == 0) {
      int smallest = std::numeric_limits<int>::max();
      for (int c = 0; c < num_classes; ++c) {
        if (by_class[c].empty()) continue;
        const int size = static_cast<int>(by_class[c].size());
        smallest = std::min(smallest, setting == SplitSetting::kSupervised
                                          ? size
                                          : size - train_quota[c]);
      }
      if (setting == SplitSetting::kSupervised) {
        val = floor_count(0.1 * smallest);
        test = floor_count(0.2 * smallest);
      } else {
        val = smallest / 3;
        test = smallest - val;
      }
    }
    std::fill(val_count.begin(), val_count.end(), val);
    std::fill(test_count.begin(), test_count.end(), test);
  }

  for (int c = 0; c < num_classes; ++c) {
    const auto& nodes = by_class[c];
    if (nodes.empty()) continue;
    // Evaluation nodes come off the front so the supervised train pool is what remains.
    const std::size_t eval_need = static_cast<std::size_t>(val_count[c] + test_count[c]);
    if (setting == SplitSetting::kSupervised) {
      if (eval_need > nodes.size()) infeasible(c, nodes.size(), static_cast<int>(eval_need), "evaluation");
      std::size_t i = 0;
      for (int k = 0; k < val_count[c]; ++k) masks.val[nodes[i++]] = true;
      for (int k = 0; k < test_count[c]; ++k) masks.test[nodes[i++]] = true;
      const std::size_t train_take = std::min<std::size_t>(train_quota[c], nodes.size() - i);
      for (std::size_t k = 0; k < train_take; ++k) masks.train[nodes[i++]] = true;
    } else {
      if (eval_need + train_quota[c] > nodes.size()) {
        infeasible(c, nodes.size() - train_quota[c], static_cast<int>(eval_need), "evaluation");
      }
      std::size_t i = 0;
      for (int k = 0; k < train_quota[c]; ++k) masks.train[nodes[i++]] = true;
      for (int k = 0; k < val_count[c]; ++k) masks.val[nodes[i++]] = true;
      for (int k = 0; k < test_count[c]; ++k) masks.test[nodes[i++]] = true;
    }
  }
  return masks;
}

std::vector<std::vector<NodeId>> train_nodes_by_class(const Graph& g) {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(g.num_classes()));
  const auto& train = g.masks().train;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (train[v] && g.label(v) != kUnlabeled) out[g.label(v)].push_back(v);
  }
  return out;
}

}  // namespace graphsann
