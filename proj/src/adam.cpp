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

#include "graphsann/adam.hpp"

#include <cmath>

#include "graphsann/errors.hpp"

namespace graphsann::ad {

void Adam::step(std::span<Parameter* const> params) {
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) {
    throw ContractError("Adam::step called with a different parameter list");
  }

  ++t_;
  const auto& o = options_;
  const double bias1 = 1.0 - std::pow(o.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(o.beta2, static_cast<double>(t_));

  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (p.grad.rows() != p.rows() || p.grad.cols() != p.cols()) {
      p.grad = Matrix::Zero(p.rows(), p.cols());
    }
    if (m_[i].rows() != p.rows() || m_[i].cols() != p.cols()) {
      throw DimensionError("Adam moment shape mismatch for parameter " + p.name);
    }
    if (o.weight_decay != 0.0) p.value *= (1.0 - o.learning_rate * o.weight_decay);

    m_[i] = o.beta1 * m_[i] + (1.0 - o.beta1) * p.grad;
    v_[i] = o.beta2 * v_[i] + (1.0 - o.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= o.learning_rate * (m_[i].array() / bias1) /
                       ((v_[i].array() / bias2).sqrt() + o.epsilon);
    p.zero_grad();
  }
}

}  // namespace graphsann::ad
