// include/dereverb/divergence.h

// Copyright 2026  Dereverb Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DEREVERB_DIVERGENCE_H_
#define DEREVERB_DIVERGENCE_H_

#include <Eigen/Core>
#include <utility>

#include "dereverb/errors.h"

namespace dereverb {

using Matrix = Eigen::ArrayXXd;

/// Divergence shape parameter.
///
/// beta = 2 is half the squared Frobenius distance, beta = 1 the
/// Kullback-Leibler divergence and beta = 0 the Itakura-Saito divergence
/// (the latter two via their closed-form limits).  The derived exponents
/// alpha1, alpha2 and eta = 1/(alpha1 - alpha2) drive the multiplicative
/// update rules; alpha1 - alpha2 >= 1 for every beta >= 0.
struct Beta {
  double value = 2.0;

  Beta() = default;
  explicit Beta(double v) : value(v) {
    if (!(v >= 0.0)) throw InvalidParameter("beta must be >= 0");
  }

  double alpha1() const { return value > 1.0 ? value - 1.0 : 0.0; }
  double alpha2() const { return value <= 2.0 ? value - 2.0 : 0.0; }
  double eta() const { return 1.0 / (alpha1() - alpha2()); }

  bool is_kl() const { return value == 1.0; }
  bool is_is() const { return value == 0.0; }
};

// D_beta(Y||X), summed over all entries.  Both matrices must be nonnegative
// and of equal shape.  Throws DivergenceSingularity when an X entry is zero
// against positive data with beta < 2; callers are expected to clamp X first.
double beta_divergence(const Matrix &Y, const Matrix &X, Beta beta);

// Convex/concave decomposition D = check + hat (both with respect to X).
// At beta = 1 and beta = 0 the parts are the finite limits whose sum equals
// the KL/IS forms exactly.  Returns {convex part, concave part}.
std::pair<double, double> beta_divergence_split(const Matrix &Y,
                                                const Matrix &X, Beta beta);

// d D_beta / dX at a single entry: X^(beta-1) - Y X^(beta-2).
double divergence_gradient(double y_entry, double x_entry, Beta beta);

// d^2 D_beta / dX^2 at a single entry:
// (beta-1) X^(beta-2) + (2-beta) X^(beta-3) Y.  Requires X > 0.
double second_derivative(double y_entry, double x_entry, Beta beta);

}  // namespace dereverb

#endif  // DEREVERB_DIVERGENCE_H_
