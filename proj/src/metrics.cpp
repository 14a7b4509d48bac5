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

#include "graphsann/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "graphsann/errors.hpp"

namespace graphsann {

double binary_auc(std::span<const double> scores, const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t num_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        pos_rank_sum += avg_rank;
        ++num_pos;
      }
    }
    i = j;
  }
  const std::size_t num_neg = n - num_pos;
  if (num_pos == 0 || num_neg == 0) throw ContractError("AUC needs both positives and negatives");
  const double np = static_cast<double>(num_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(num_neg));
}

MetricsReport evaluate(const ad::Matrix& probs, std::span<const int> labels,
                       const std::vector<bool>& mask) {
  const int classes = static_cast<int>(probs.cols());
  std::vector<int> rows;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) rows.push_back(static_cast<int>(i));
  }
  if (rows.empty()) throw ContractError("evaluate over an empty mask");

  MetricsReport r;
  r.count = static_cast<int>(rows.size());
  r.confusion.assign(classes, std::vector<int>(classes, 0));
  int correct = 0;
  for (int i : rows) {
    Eigen::Index pred = 0;
    probs.row(i).maxCoeff(&pred);
    ++r.confusion[labels[i]][pred];
    correct += pred == labels[i];
  }
  r.accuracy = static_cast<double>(correct) / r.count;

  r.precision.assign(classes, 0.0);
  r.recall.assign(classes, 0.0);
  r.f1.assign(classes, 0.0);
  r.auc.assign(classes, 0.0);
  r.auc_skipped.assign(classes, true);
  int auc_classes = 0;
  for (int c = 0; c < classes; ++c) {
    int tp = r.confusion[c][c], predicted = 0, actual = 0;
    for (int k = 0; k < classes; ++k) {
      predicted += r.confusion[k][c];
      actual += r.confusion[c][k];
    }
    if (predicted > 0) r.precision[c] = static_cast<double>(tp) / predicted;
    if (actual > 0) r.recall[c] = static_cast<double>(tp) / actual;
    if (r.precision[c] + r.recall[c] > 0.0) {
      r.f1[c] = 2.0 * r.precision[c] * r.recall[c] / (r.precision[c] + r.recall[c]);
    }
    r.macro_f1 += r.f1[c];

    if (actual > 0 && actual < r.count) {
      std::vector<double> scores;
      std::vector<bool> positive;
      scores.reserve(rows.size());
      for (int i : rows) {
        scores.push_back(probs(i, c));
        positive.push_back(labels[i] == c);
      }
      r.auc[c] = binary_auc(scores, positive);
      r.auc_skipped[c] = false;
      r.macro_auc += r.auc[c];
      ++auc_classes;
    }
  }
  r.macro_f1 /= classes;
  if (auc_classes > 0) r.macro_auc /= auc_classes;
  return r;
}

}  // namespace graphsann
