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

#include <span>
#include <vector>

#include "graphsann/autodiff.hpp"

namespace graphsann {

struct MetricsReport {
  int count = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // Mean one-vs-rest AUC over the classes where it is defined.
  double macro_auc = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<double> auc;             // per class; meaningful only where !auc_skipped
  std::vector<bool> auc_skipped;       // class absent from, or the only class in, the mask
  std::vector<std::vector<int>> confusion;  // [true][predicted]
};

/// Rank-based AUC (Mann-Whitney U) of scores for positives vs negatives,
/// ties counted 0.5. Requires both sets nonempty.
double binary_auc(std::span<const double> scores, const std::vector<bool>& positive);

/// Accuracy, macro-F1 and macro one-vs-rest AUC over the rows selected by
/// `mask`. Throws ContractError on an empty mask.
MetricsReport evaluate(const ad::Matrix& probs, std::span<const int> labels,
                       const std::vector<bool>& mask);

}  // namespace graphsann
