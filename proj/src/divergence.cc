// src/divergence.cc

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

#include "dereverb/divergence.h"

#include <cmath>

namespace dereverb {

namespace {

void check_shapes(const Matrix &Y, const Matrix &X) {
  if (Y.rows() != X.rows() || Y.cols() != X.cols())
    throw ShapeError("divergence: Y and X shapes differ");
}

// Zero model entry against positive data is only integrable for beta >= 2.
void check_entry(double y, double x, double beta) {
  if (x == 0.0 && y > 0.0 && beta < 2.0)
    throw DivergenceSingularity("divergence: zero X entry against Y > 0");
}

double kl_entry(double y, double x) {
  check_entry(y, x, 1.0);
  if (y == 0.0) return x;  // 0 log 0 := 0
  return y * std::log(y / x) - y + x;
}

double is_entry(double y, double x) {
  check_entry(y, x, 0.0);
  if (y == 0.0 && x == 0.0) return 0.0;
  const double r = y / x;  // y = 0, x > 0 gives +inf via -log 0
  return r - std::log(r) - 1.0;
}

// Generic formula, rearranged so Y^beta is formed directly and no 0 * inf
// products appear for zero entries.
double generic_entry(double y, double x, double beta) {
  check_entry(y, x, beta);
  if (y == 0.0 && x == 0.0) return 0.0;
  const double xb1 = std::pow(x, beta - 1.0);
  const double t1 = (std::pow(y, beta) - y * xb1) / (beta * (beta - 1.0));
  const double t2 = (std::pow(x, beta) - xb1 * y) / beta;
  return t1 + t2;
}

}  // namespace

double beta_divergence(const Matrix &Y, const Matrix &X, Beta beta) {
  check_shapes(Y, X);
  const double b = beta.value;
  double total = 0.0;
  const double *y = Y.data();
  const double *x = X.data();
  const Eigen::Index n = Y.size();
  if (beta.is_kl()) {
    for (Eigen::Index i = 0; i < n; ++i) total += kl_entry(y[i], x[i]);
  } else if (beta.is_is()) {
    for (Eigen::Index i = 0; i < n; ++i) total += is_entry(y[i], x[i]);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) total += generic_entry(y[i], x[i], b);
  }
  return total;
}

std::pair<double, double> beta_divergence_split(const Matrix &Y,
                                                const Matrix &X, Beta beta) {
  check_shapes(Y, X);
  const double b = beta.value;
  double convex = 0.0, concave = 0.0;
  const double *yd = Y.data();
  const double *xd = X.data();
  const Eigen::Index n = Y.size();

  if (beta.is_kl()) {
    // Limit from below of the displayed parts: the convex part tends to
    // Y log(Y/X) - Y and the concave one to X; their sum is exactly KL.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = yd[i], x = xd[i];
      check_entry(y, x, 1.0);
      convex += (y == 0.0) ? 0.0 : y * std::log(y / x) - y;
      concave += x;
    }
    return {convex, concave};
  }
  if (beta.is_is()) {
    // Finite parts of the beta -> 0 limit: Y/X - log Y - 1 (convex) and
    // log X (concave); the divergent constants cancel in the sum.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double y = yd[i], x = xd[i];
      check_entry(y, x, 0.0);
      if (y == 0.0 && x == 0.0) continue;
      convex += y / x - std::log(y) - 1.0;
      concave += std::log(x);
    }
    return {convex, concave};
  }

  const bool gt1 = b > 1.0;
  const bool le2 = b <= 2.0;
  const bool lt1 = b < 1.0;
  const bool gt2 = b > 2.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = yd[i], x = xd[i];
    check_entry(y, x, b);
    if (y == 0.0 && x == 0.0) continue;
    const double xb = std::pow(x, b);
    const double xb1 = std::pow(x, b - 1.0);
    const double yxb1 = (y == 0.0) ? 0.0 : y * xb1;
    convex += (gt1 ? xb / b : 0.0) - (le2 ? yxb1 / (b - 1.0) : 0.0) +
              std::pow(y, b) / (b * (b - 1.0));
    concave += (lt1 ? xb / b : 0.0) - (gt2 ? yxb1 / (b - 1.0) : 0.0);
  }
  return {convex, concave};
}

double divergence_gradient(double y_entry, double x_entry, Beta beta) {
  if (x_entry <= 0.0)
    throw DivergenceSingularity("divergence_gradient: X entry must be > 0");
  const double b = beta.value;
  return std::pow(x_entry, b - 1.0) - y_entry * std::pow(x_entry, b - 2.0);
}

double second_derivative(double y_entry, double x_entry, Beta beta) {
  if (x_entry <= 0.0)
    throw DivergenceSingularity("second_derivative: X entry must be > 0");
  const double b = beta.value;
  return (b - 1.0) * std::pow(x_entry, b - 2.0) +
         (2.0 - b) * std::pow(x_entry, b - 3.0) * y_entry;
}

}  // namespace dereverb
