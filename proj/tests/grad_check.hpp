// Central-difference gradient oracle shared by the test binaries.
#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "graphsann/autodiff.hpp"

namespace graphsann::testing {

using LossBuilder = std::function<ad::Var(ad::Tape&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
};

inline double evaluate(const LossBuilder& build) {
  ad::Tape tape;
  tape.set_grad_enabled(false);
  return build(tape).scalar();
}

// Compares backward() against central differences with step h for every
// parameter. Error per parameter is ||analytic - numeric|| / max(||analytic||,
// ||numeric||, 1e-6).
inline GradCheckResult check_gradients(std::span<ad::Parameter* const> params,
                                       const LossBuilder& build, double h = 1e-5) {
  for (ad::Parameter* p : params) p->grad = ad::Matrix::Zero(p->rows(), p->cols());
  {
    ad::Tape tape;
    tape.backward(build(tape));
  }
  GradCheckResult result;
  for (ad::Parameter* p : params) {
    ad::Matrix numeric(p->rows(), p->cols());
    for (ad::Index i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + h;
      const double up = evaluate(build);
      x = saved - h;
      const double down = evaluate(build);
      x = saved;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    const double scale = std::max({p->grad.norm(), numeric.norm(), 1e-6});
    const double err = (p->grad - numeric).norm() / scale;
    if (err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_param = p->name;
    }
  }
  return result;
}

inline ad::Matrix uniform_matrix(ad::Index rows, ad::Index cols, std::mt19937_64& rng,
                                 double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ad::Matrix m(rows, cols);
  for (ad::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace graphsann::testing
