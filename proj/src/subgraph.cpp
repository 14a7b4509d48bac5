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

#include "graphsann/subgraph.hpp"

#include <algorithm>

namespace graphsann {

MessageIndex MessageIndex::from_csr(int num_nodes, std::span<const int> offsets,
                                    std::span<const NodeId> targets) {
  MessageIndex m;
  m.num_nodes = num_nodes;
  m.dst.reserve(targets.size());
  m.src.reserve(targets.size());
  for (int u = 0; u < num_nodes; ++u) {
    for (int i = offsets[u]; i < offsets[u + 1]; ++i) {
      m.dst.push_back(u);
      m.src.push_back(targets[i]);
    }
  }
  return m;
}

MessageIndex MessageIndex::with_self_loops() const {
  MessageIndex m = *this;
  for (int u = 0; u < num_nodes; ++u) {
    m.dst.push_back(u);
    m.src.push_back(u);
  }
  return m;
}

ad::Matrix Subgraph::drnl_onehot(int cap) const {
  ad::Matrix out = ad::Matrix::Zero(num_nodes(), cap + 1);
  for (int i = 0; i < num_nodes(); ++i) out(i, std::clamp(drnl[i], 0, cap)) = 1.0;
  return out;
}

}  // namespace graphsann
