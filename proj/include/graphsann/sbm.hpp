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
#include <vector>

#include "graphsann/graph.hpp"

namespace graphsann {

/// Stochastic block model with class-conditioned Gaussian node features.
struct SbmSpec {
  std::vector<int> sizes;
  double p_intra = 0.1;
  double p_inter = 0.01;
  // One mean vector per class; all of equal length (the feature dim).
  std::vector<std::vector<double>> means;
  double noise_std = 1.0;
  std::uint64_t seed = 0;

  /// Class c gets `separation` on coordinate c % dim, scaled by 1 + c / dim so
  /// that classes stay distinct when there are more classes than dimensions.
  static std::vector<std::vector<double>> axis_means(int num_classes, int dim, double separation);

  void validate() const;
};

/// Nodes are numbered class by class; labels are attached, masks are empty.
Graph generate_sbm(const SbmSpec& spec);

}  // namespace graphsann
