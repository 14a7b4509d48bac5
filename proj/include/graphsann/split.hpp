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
#include <vector>

#include "graphsann/graph.hpp"

namespace graphsann {

struct ImbalanceSpec {
  std::vector<int> minority_classes;
  double im_ratio = 0.1;
  int majority_train_count = 20;

  bool is_minority(int c) const;
  void validate(int num_classes) const;
};

enum class SplitSetting { kSemiSupervised, kSupervised };

/// How validation/test nodes are drawn per class.
struct EvalSplit {
  enum class Mode {
    kEqualCount,  // same number of val/test nodes from every class
    kRatio,       // each class's remaining nodes split val:test by val_fraction
  };
  Mode mode = Mode::kEqualCount;
  // kEqualCount only; 0 picks the largest count every class can afford.
  int val_per_class = 0;
  int test_per_class = 0;
  double val_fraction = 1.0 / 3.0;
};

/**
 * Builds train/val/test masks over labeled nodes.
 *
 * Semi-supervised: majority classes get majority_train_count training nodes,
 * minority classes floor(majority_train_count * im_ratio). Supervised: a
 * per-class 7:1:2 split whose minority training part is down-sampled to
 * floor(im_ratio * largest majority training count).
 *
 * Throws SplitError naming the class when a quota cannot be met.
 */
SplitMasks make_imbalanced_split(const Graph& g, const ImbalanceSpec& spec, SplitSetting setting,
                                 const EvalSplit& eval, std::mt19937_64& rng);

/// Training node ids grouped by class (index = class id).
std::vector<std::vector<NodeId>> train_nodes_by_class(const Graph& g);

// floor() that tolerates representation error, e.g. 20 * 0.3.
int floor_count(double x);

}  // namespace graphsann
