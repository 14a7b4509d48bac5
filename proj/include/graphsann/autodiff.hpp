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

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace graphsann::ad {

/**
 * Reverse-mode differentiation over dense row-major float64 matrices.
 *
 * A Tape records every operation of one forward pass (define-by-run) and is
 * thrown away afterwards. Learnable weights live outside the tape as
 * Parameter objects; Tape::param() binds a parameter as a leaf and backward()
 * accumulates the leaf gradient into Parameter::grad.
 *
 * A tape is single-owner. It can be consumed by backward() exactly once; a
 * second call throws ContractError.
 */

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Matrix value);

  Index rows() const { return value.rows(); }
  Index cols() const { return value.cols(); }
  void zero_grad() { grad.setZero(); }

  std::string name;
  Matrix value;
  Matrix grad;
};

class Tape;

// Lightweight handle to a tape node.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  // Gradient after backward(); an all-zero matrix if the node was unreachable.
  Matrix grad() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  // Value of a 1x1 node.
  double scalar() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the node's own id; reads its gradient and accumulates into inputs.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var variable(Matrix value);
  Var param(Parameter& p);

  // With gradients disabled, variable() and param() produce constant leaves
  // and no backward closures are recorded.
  void set_grad_enabled(bool enabled) { grad_enabled_ = enabled; }
  bool grad_enabled() const { return grad_enabled_; }
  // With parameters frozen, param() records a constant leaf: gradients can
  // still reach variable() inputs but never accumulate into a Parameter.
  void set_parameters_frozen(bool frozen) { params_frozen_ = frozen; }

  void backward(Var loss);
  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

  // Op-author interface.
  Var push(Matrix value, bool requires_grad, BackwardFn fn);
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool has_grad(std::size_t id) const { return nodes_[id].grad.size() != 0; }
  // Gradient buffer of a node, allocated as zeros on first access.
  Matrix& grad(std::size_t id);
  const Matrix& grad_or_empty(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
  bool params_frozen_ = false;
  bool consumed_ = false;
};

// --- operations -----------------------------------------------------------

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var negate(Var a);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
Var square(Var a);
Var sigmoid(Var a);
Var relu(Var a);
// log(max(a, floor)); gradient is zero where the clamp is active.
Var log_clamped(Var a, double floor);

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var sum_all(Var a);
Var mean_all(Var a);
// n x d -> n x 1 Euclidean norm of each row.
Var row_l2norm(Var a);
// Row-wise softmax with max subtraction.
Var softmax_rows(Var a);

// out[i] = x[index[i]]
Var gather_rows(Var x, std::span<const int> index);
// out[index[i]] += x[i], out has `rows` rows.
Var scatter_add_rows(Var x, std::span<const int> index, Index rows);
// x (n x d) scaled row-wise by w (n x 1).
Var mul_rowwise(Var x, Var w);
// out[dst[e]] += w[e] * x[src[e]] for every edge e; w is E x 1, out has `rows` rows.
// Same result as scatter_add_rows(mul_rowwise(gather_rows(x, src), w), dst, rows)
// without the E x d intermediates.
Var edge_aggregate(Var x, Var w, std::span<const int> dst, std::span<const int> src, Index rows);
// x (n x d) + b (1 x d) broadcast over rows.
Var add_row_broadcast(Var x, Var b);
Var column(Var x, Index j);
Var row_slice(Var x, Index begin, Index count);
// out[i] = x(rows[i], cols[i]) as a k x 1 column.
Var pick(Var x, std::span<const int> rows, std::span<const int> cols);

// Inverted dropout: survivors scaled by 1/(1-rate); identity when !training.
Var dropout(Var x, double rate, bool training, std::mt19937_64& rng);

bool all_finite(const Matrix& m);

}  // namespace graphsann::ad
