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

#include "graphsann/sbm.hpp"

#include <random>

#include "graphsann/errors.hpp"

namespace graphsann {

std::vector<std::vector<double>> SbmSpec::axis_means(int num_classes, int dim, double separation) {
  if (dim < 1) throw ConfigError("feature dim must be >= 1");
  std::vector<std::vector<double>> means(num_classes, std::vector<double>(dim, 0.0));
  for (int c = 0; c < num_classes; ++c) {
    means[c][c % dim] = separation * (1.0 + static_cast<double>(c / dim));
  }
  return means;
}

void SbmSpec::validate() const {
  if (sizes.empty()) throw ConfigError("sbm needs at least one class");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("sbm class sizes must be >= 1");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_intra) || !prob(p_inter)) throw ConfigError("sbm edge probabilities must lie in [0, 1]");
  if (means.size() != sizes.size()) throw ConfigError("sbm needs one mean vector per class");
  for (const auto& m : means) {
    if (m.size() != means[0].size() || m.empty()) {
      throw ConfigError("sbm mean vectors must share a nonzero length");
    }
  }
  if (noise_std < 0.0) throw ConfigError("sbm noise_std must be >= 0");
}

Graph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<int> labels;
  for (std::size_t c = 0; c < spec.sizes.size(); ++c) {
    labels.insert(labels.end(), static_cast<std::size_t>(spec.sizes[c]), static_cast<int>(c));
  }
  const int n = static_cast<int>(labels.size());
  const int dim = static_cast<int>(spec.means[0].size());

  EdgeList edges;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_intra : spec.p_inter;
      if (unit(rng) < p) edges.emplace_back(u, v);
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  ad::Matrix features(n, dim);
  for (int u = 0; u < n; ++u) {
    for (int j = 0; j < dim; ++j) {
      features(u, j) = spec.means[labels[u]][j] + spec.noise_std * noise(rng);
    }
  }
  return Graph::from_edge_list(edges, n, std::move(features), std::move(labels));
}

}  // namespace graphsann
