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

#include "graphsann/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphsann/errors.hpp"

namespace graphsann::ad {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape(a) + " and " + shape(b));
}

void same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw ContractError("operands recorded on different tapes");
}

void require_same_shape(const char* op, Var a, Var b) {
  same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error(op, a.value(), b.value());
}

bool any_grad(Var a) { return a.tape().requires_grad(a.id()); }
bool any_grad(Var a, Var b) { return any_grad(a) || any_grad(b); }

}  // namespace

Parameter::Parameter(std::string n, Matrix v)
    : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

const Matrix& Var::value() const { return tape_->value(id_); }

Matrix Var::grad() const {
  const Matrix& g = tape_->grad_or_empty(id_);
  if (g.size() == 0) return Matrix::Zero(rows(), cols());
  return g;
}

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("scalar() on a " + shape(v) + " node");
  return v(0, 0);
}

Var Tape::push(Matrix value, bool requires_grad, BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad && grad_enabled_;
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::variable(Matrix value) { return push(std::move(value), grad_enabled_, nullptr); }

Var Tape::param(Parameter& p) {
  const bool live = grad_enabled_ && !params_frozen_;
  Var v = push(p.value, live, nullptr);
  if (live) nodes_[v.id()].param = &p;
  return v;
}

Matrix& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw ContractError("loss belongs to a different tape");
  if (consumed_) throw ContractError("backward() called twice on the same tape");
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ContractError("backward() needs a scalar loss, got " + shape(loss.value()));
  }
  consumed_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  grad(loss.id())(0, 0) += 1.0;

  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) {
      if (n.param->grad.rows() != n.value.rows() || n.param->grad.cols() != n.value.cols()) {
        n.param->grad = Matrix::Zero(n.value.rows(), n.value.cols());
      }
      n.param->grad += n.grad;
    }
  }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

// --- elementwise -------------------------------------------------------------

Var matmul(Var a, Var b) {
  same_tape(a, b);
  if (a.cols() != b.rows()) shape_error("matmul", a.value(), b.value());
  Matrix out = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().push(std::move(out), any_grad(a, b), [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    if (t.requires_grad(ia)) t.grad(ia).noalias() += g * t.value(ib).transpose();
    if (t.requires_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * g;
  });
}

Var add(Var a, Var b) {
  require_same_shape("add", a, b);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().push(a.value() + b.value(), any_grad(a, b), [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    if (t.requires_grad(ia)) t.grad(ia) += g;
    if (t.requires_grad(ib)) t.grad(ib) += g;
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a, b);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().push(a.value() - b.value(), any_grad(a, b), [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    if (t.requires_grad(ia)) t.grad(ia) += g;
    if (t.requires_grad(ib)) t.grad(ib) -= g;
  });
}

Var hadamard(Var a, Var b) {
  require_same_shape("hadamard", a, b);
  const std::size_t ia = a.id(), ib = b.id();
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape().push(std::move(out), any_grad(a, b), [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    if (t.requires_grad(ia)) t.grad(ia) += g.cwiseProduct(t.value(ib));
    if (t.requires_grad(ib)) t.grad(ib) += g.cwiseProduct(t.value(ia));
  });
}

Var negate(Var a) { return scale(a, -1.0); }

Var scale(Var a, double factor) {
  const std::size_t ia = a.id();
  return a.tape().push(a.value() * factor, any_grad(a), [ia, factor](Tape& t, std::size_t self) {
    t.grad(ia) += t.grad_or_empty(self) * factor;
  });
}

Var add_scalar(Var a, double offset) {
  const std::size_t ia = a.id();
  Matrix out = a.value().array() + offset;
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    t.grad(ia) += t.grad_or_empty(self);
  });
}

Var square(Var a) {
  const std::size_t ia = a.id();
  Matrix out = a.value().array().square();
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    t.grad(ia).array() += 2.0 * t.grad_or_empty(self).array() * t.value(ia).array();
  });
}

Var sigmoid(Var a) {
  const std::size_t ia = a.id();
  Matrix out = a.value().unaryExpr([](double x) {
    // Branch keeps exp() from overflowing on large negative inputs.
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    t.grad(ia).array() += t.grad_or_empty(self).array() * y.array() * (1.0 - y.array());
  });
}

Var relu(Var a) {
  const std::size_t ia = a.id();
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    const Matrix& x = t.value(ia);
    t.grad(ia).array() += (x.array() > 0.0).select(t.grad_or_empty(self).array(), 0.0);
  });
}

Var log_clamped(Var a, double floor) {
  const std::size_t ia = a.id();
  Matrix out = a.value().unaryExpr([floor](double x) { return std::log(std::max(x, floor)); });
  return a.tape().push(std::move(out), any_grad(a), [ia, floor](Tape& t, std::size_t self) {
    const Matrix& x = t.value(ia);
    const Matrix& g = t.grad_or_empty(self);
    Matrix& ga = t.grad(ia);
    for (Index i = 0; i < x.size(); ++i) {
      if (x.data()[i] > floor) ga.data()[i] += g.data()[i] / x.data()[i];
    }
  });
}

// --- structural -----------------------------------------------------------

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols of nothing");
  const Index rows = parts[0].rows();
  Index cols = 0;
  bool rg = false;
  std::vector<std::size_t> ids;
  std::vector<Index> widths;
  for (const Var& p : parts) {
    same_tape(parts[0], p);
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
    rg = rg || any_grad(p);
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  Matrix out(rows, cols);
  Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return parts[0].tape().push(std::move(out), rg, [ids, widths](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    Index off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) t.grad(ids[k]) += g.middleCols(off, widths[k]);
      off += widths[k];
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows of nothing");
  const Index cols = parts[0].cols();
  Index rows = 0;
  bool rg = false;
  std::vector<std::size_t> ids;
  std::vector<Index> heights;
  for (const Var& p : parts) {
    same_tape(parts[0], p);
    if (p.cols() != cols) shape_error("concat_rows", parts[0].value(), p.value());
    rows += p.rows();
    rg = rg || any_grad(p);
    ids.push_back(p.id());
    heights.push_back(p.rows());
  }
  Matrix out(rows, cols);
  Index offset = 0;
  for (const Var& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    offset += p.rows();
  }
  return parts[0].tape().push(std::move(out), rg, [ids, heights](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    Index off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) t.grad(ids[k]) += g.middleRows(off, heights[k]);
      off += heights[k];
    }
  });
}

Var sum_all(Var a) {
  const std::size_t ia = a.id();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    t.grad(ia).array() += t.grad_or_empty(self)(0, 0);
  });
}

Var mean_all(Var a) {
  if (a.value().size() == 0) throw ContractError("mean_all of an empty tensor");
  const std::size_t ia = a.id();
  const double n = static_cast<double>(a.value().size());
  Matrix out(1, 1);
  out(0, 0) = a.value().sum() / n;
  return a.tape().push(std::move(out), any_grad(a), [ia, n](Tape& t, std::size_t self) {
    t.grad(ia).array() += t.grad_or_empty(self)(0, 0) / n;
  });
}

Var row_l2norm(Var a) {
  const std::size_t ia = a.id();
  Matrix out = a.value().rowwise().norm();
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(self);
    const Matrix& g = t.grad_or_empty(self);
    Matrix& gx = t.grad(ia);
    for (Index r = 0; r < x.rows(); ++r) {
      if (y(r, 0) > 0.0) gx.row(r) += (g(r, 0) / y(r, 0)) * x.row(r);
    }
  });
}

Var softmax_rows(Var a) {
  const std::size_t ia = a.id();
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return a.tape().push(std::move(out), any_grad(a), [ia](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    const Matrix& g = t.grad_or_empty(self);
    Matrix& gx = t.grad(ia);
    for (Index r = 0; r < y.rows(); ++r) {
      const double dot = g.row(r).dot(y.row(r));
      gx.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  });
}

Var gather_rows(Var x, std::span<const int> index) {
  const Matrix& xv = x.value();
  Matrix out(static_cast<Index>(index.size()), xv.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= xv.rows()) {
      throw DimensionError("gather_rows: index " + std::to_string(index[i]) + " outside " +
                           shape(xv));
    }
    out.row(static_cast<Index>(i)) = xv.row(index[i]);
  }
  const std::size_t ix = x.id();
  std::vector<int> idx(index.begin(), index.end());
  return x.tape().push(std::move(out), any_grad(x), [ix, idx = std::move(idx)](Tape& t,
                                                                                 std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < idx.size(); ++i) gx.row(idx[i]) += g.row(static_cast<Index>(i));
  });
}

Var scatter_add_rows(Var x, std::span<const int> index, Index rows) {
  const Matrix& xv = x.value();
  if (static_cast<Index>(index.size()) != xv.rows()) {
    throw DimensionError("scatter_add_rows: " + std::to_string(index.size()) +
                         " indices for " + shape(xv));
  }
  Matrix out = Matrix::Zero(rows, xv.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= rows) {
      throw DimensionError("scatter_add_rows: index " + std::to_string(index[i]) +
                           " outside " + std::to_string(rows) + " rows");
    }
    out.row(index[i]) += xv.row(static_cast<Index>(i));
  }
  const std::size_t ix = x.id();
  std::vector<int> idx(index.begin(), index.end());
  return x.tape().push(std::move(out), any_grad(x), [ix, idx = std::move(idx)](Tape& t,
                                                                                 std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < idx.size(); ++i) gx.row(static_cast<Index>(i)) += g.row(idx[i]);
  });
}

Var mul_rowwise(Var x, Var w) {
  same_tape(x, w);
  if (w.cols() != 1 || w.rows() != x.rows()) shape_error("mul_rowwise", x.value(), w.value());
  Matrix out = x.value().array().colwise() * w.value().col(0).array();
  const std::size_t ix = x.id(), iw = w.id();
  return x.tape().push(std::move(out), any_grad(x, w), [ix, iw](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    if (t.requires_grad(ix)) {
      t.grad(ix).array() += g.array().colwise() * t.value(iw).col(0).array();
    }
    if (t.requires_grad(iw)) {
      t.grad(iw).col(0) += g.cwiseProduct(t.value(ix)).rowwise().sum();
    }
  });
}

Var edge_aggregate(Var x, Var w, std::span<const int> dst, std::span<const int> src, Index rows) {
  same_tape(x, w);
  const Matrix& xv = x.value();
  if (dst.size() != src.size() || w.cols() != 1 || w.rows() != static_cast<Index>(dst.size())) {
    throw DimensionError("edge_aggregate: " + std::to_string(dst.size()) + " dst, " +
                         std::to_string(src.size()) + " src indices with weights " + shape(w.value()));
  }
  const Matrix& wv = w.value();
  Matrix out = Matrix::Zero(rows, xv.cols());
  for (std::size_t e = 0; e < dst.size(); ++e) {
    if (dst[e] < 0 || dst[e] >= rows || src[e] < 0 || src[e] >= xv.rows()) {
      throw DimensionError("edge_aggregate: edge " + std::to_string(e) + " out of range");
    }
    out.row(dst[e]) += wv(static_cast<Index>(e), 0) * xv.row(src[e]);
  }
  const std::size_t ix = x.id(), iw = w.id();
  return x.tape().push(
      std::move(out), any_grad(x, w),
      [ix, iw, d = std::vector<int>(dst.begin(), dst.end()),
       s = std::vector<int>(src.begin(), src.end())](Tape& t, std::size_t self) {
        const Matrix& g = t.grad_or_empty(self);
        const Matrix& xv = t.value(ix);
        const Matrix& wv = t.value(iw);
        const bool gx = t.requires_grad(ix), gw = t.requires_grad(iw);
        for (std::size_t e = 0; e < d.size(); ++e) {
          const Index k = static_cast<Index>(e);
          if (gx) t.grad(ix).row(s[e]) += wv(k, 0) * g.row(d[e]);
          if (gw) t.grad(iw)(k, 0) += g.row(d[e]).dot(xv.row(s[e]));
        }
      });
}

Var add_row_broadcast(Var x, Var b) {
  same_tape(x, b);
  if (b.rows() != 1 || b.cols() != x.cols()) shape_error("add_row_broadcast", x.value(), b.value());
  Matrix out = x.value().rowwise() + b.value().row(0);
  const std::size_t ix = x.id(), ib = b.id();
  return x.tape().push(std::move(out), any_grad(x, b), [ix, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    if (t.requires_grad(ix)) t.grad(ix) += g;
    if (t.requires_grad(ib)) t.grad(ib) += g.colwise().sum();
  });
}

Var column(Var x, Index j) {
  if (j < 0 || j >= x.cols()) throw DimensionError("column " + std::to_string(j) + " of " + shape(x.value()));
  const std::size_t ix = x.id();
  Matrix out = x.value().col(j);
  return x.tape().push(std::move(out), any_grad(x), [ix, j](Tape& t, std::size_t self) {
    t.grad(ix).col(j) += t.grad_or_empty(self).col(0);
  });
}

Var row_slice(Var x, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > x.rows()) {
    throw DimensionError("row_slice [" + std::to_string(begin) + ", +" + std::to_string(count) +
                         ") of " + shape(x.value()));
  }
  const std::size_t ix = x.id();
  Matrix out = x.value().middleRows(begin, count);
  return x.tape().push(std::move(out), any_grad(x), [ix, begin, count](Tape& t, std::size_t self) {
    t.grad(ix).middleRows(begin, count) += t.grad_or_empty(self);
  });
}

Var pick(Var x, std::span<const int> rows, std::span<const int> cols) {
  if (rows.size() != cols.size()) throw DimensionError("pick: rows/cols length mismatch");
  const Matrix& xv = x.value();
  Matrix out(static_cast<Index>(rows.size()), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= xv.rows() || cols[i] < 0 || cols[i] >= xv.cols()) {
      throw DimensionError("pick: entry outside " + shape(xv));
    }
    out(static_cast<Index>(i), 0) = xv(rows[i], cols[i]);
  }
  const std::size_t ix = x.id();
  std::vector<int> r(rows.begin(), rows.end()), c(cols.begin(), cols.end());
  return x.tape().push(std::move(out), any_grad(x), [ix, r = std::move(r), c = std::move(c)](
                                                        Tape& t, std::size_t self) {
    const Matrix& g = t.grad_or_empty(self);
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < r.size(); ++i) gx(r[i], c[i]) += g(static_cast<Index>(i), 0);
  });
}

Var dropout(Var x, double rate, bool training, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? keep_scale : 0.0;
  Matrix out = x.value().cwiseProduct(mask);
  const std::size_t ix = x.id();
  return x.tape().push(std::move(out), any_grad(x), [ix, mask = std::move(mask)](Tape& t,
                                                                                   std::size_t self) {
    t.grad(ix) += t.grad_or_empty(self).cwiseProduct(mask);
  });
}

}  // namespace graphsann::ad
