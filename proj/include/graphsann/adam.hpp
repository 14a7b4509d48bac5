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
#include <span>
#include <vector>

#include "graphsann/autodiff.hpp"

namespace graphsann::ad {

/// Adam with decoupled weight decay. Moments are kept per parameter, in the
/// order the parameter list is passed to step(); that order must not change
/// between steps.
class Adam {
 public:
  struct Options {
    double learning_rate = 0.001;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  explicit Adam(Options options) : options_(options) {}

  /// Applies one update using each parameter's accumulated grad, then zeroes
  /// the grads.
  void step(std::span<Parameter* const> params);

  std::int64_t step_count() const { return t_; }
  const Options& options() const { return options_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  Options options_;
  std::int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace graphsann::ad
