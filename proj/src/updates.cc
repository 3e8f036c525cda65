// src/updates.cc

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

#include "dereverb/updates.h"

#include <cmath>
#include <iostream>

namespace dereverb {

namespace {

// X^p with X floored at eps so negative powers stay finite.
Matrix floored_pow(const Matrix &x, double p, double eps) {
  if (p == 0.0) return Matrix::Ones(x.rows(), x.cols());
  if (p == 1.0) return x.max(eps);
  return x.max(eps).pow(p);
}

void check_data_shape(const ModelState &state, const Matrix &Y) {
  if (Y.rows() != state.x.rows() || Y.cols() != state.x.cols())
    throw ShapeError("update: Y shape does not match the model synthesis");
}

void check_weight_size(const Eigen::ArrayXd &w, Eigen::Index expect,
                       const char *name) {
  if (w.size() != 0 && w.size() != expect)
    throw ShapeError(std::string("weights: bad length for ") + name);
}

// Lag-correlation sums shared by the W numerator and denominator:
// out(k,j) = sum_m H(k,m) sum_n S(k,n) U(j,n-m).
Matrix lag_corr_wu(const Matrix &s, const Matrix &u, const Matrix &h) {
  const Eigen::Index K = s.rows(), N = s.cols(), J = u.rows(),
                     M = h.cols();
  Matrix out = Matrix::Zero(K, J);
  for (Eigen::Index m = 0; m < M && m < N; ++m) {
    if ((h.col(m) == 0.0).all()) continue;
    const Matrix g = (s.rightCols(N - m).matrix() *
                      u.leftCols(N - m).matrix().transpose())
                         .array();
    out += g.colwise() * h.col(m);
  }
  return out;
}

// out(k,t) = sum_m S(k,t+m) H(k,m): correlation of the rows of S with the
// kernel rows (the adjoint of the synthesis convolution).
Matrix lag_corr_kernel(const Matrix &s, const Matrix &h) {
  const Eigen::Index K = s.rows(), N = s.cols(), M = h.cols();
  Matrix out = Matrix::Zero(K, N);
  for (Eigen::Index m = 0; m < M && m < N; ++m) {
    if ((h.col(m) == 0.0).all()) continue;
    out.leftCols(N - m) += s.rightCols(N - m).colwise() * h.col(m);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd difference_gram(Eigen::Index taps) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(taps, taps);
  if (taps < 2) return g;
  for (Eigen::Index m = 0; m < taps; ++m)
    g(m, m) = (m == 0 || m == taps - 1) ? 1.0 : 2.0;
  for (Eigen::Index m = 0; m + 1 < taps; ++m) g(m, m + 1) = g(m + 1, m) = -1.0;
  return g;
}

double kernel_smoothness_penalty(const ReverbKernel &H,
                                 const Eigen::ArrayXd &lambda_h) {
  if (lambda_h.size() == 0) return 0.0;
  if (lambda_h.size() != H.bands())
    throw ShapeError("weights: lambda_h length != band count");
  const Eigen::Index M = H.taps();
  if (M < 2) return 0.0;
  const Matrix diff = H.h.rightCols(M - 1) - H.h.leftCols(M - 1);
  return (diff.square().rowwise().sum() * lambda_h).sum();
}

double cost(const ModelState &state, const Matrix &Y, Beta beta,
            const PenaltyWeights &weights) {
  check_data_shape(state, Y);
  check_weight_size(weights.lambda_u, state.activations.frames(), "lambda_u");
  double f = beta_divergence(Y, state.x, beta);
  if (weights.lambda_u.size() != 0)
    f += (state.activations.u.colwise().sum() * weights.lambda_u.transpose())
             .sum();
  f += kernel_smoothness_penalty(state.kernel, weights.lambda_h);
  return f;
}

Dictionary update_W(const ModelState &state, const Matrix &Y, Beta beta,
                    double eps) {
  check_data_shape(state, Y);
  const double b = beta.value;
  const double eta = beta.eta();

  const Matrix p = floored_pow(state.x, b - 2.0, eps) * Y;
  const Matrix q = floored_pow(state.x, b - 1.0, eps);
  const Matrix num = lag_corr_wu(p, state.activations.u, state.kernel.h);
  const Matrix den = lag_corr_wu(q, state.activations.u, state.kernel.h);

  Dictionary out;
  // Denominator floored at eps only to keep dead atoms (0/0) unchanged.
  out.w = state.dictionary.w * num.pow(eta).max(eps) / den.pow(eta).max(eps);
  // Entries must never reach zero under a multiplicative scheme; repeated
  // shrinking can underflow to an absorbing 0.0, so floor on the factor's
  // own scale.
  out.w = out.w.max(eps * out.w.maxCoeff());
  return out;
}

Activations update_U(const ModelState &state, const Matrix &Y, Beta beta,
                     const Eigen::ArrayXd &lambda_u, double eps) {
  check_data_shape(state, Y);
  check_weight_size(lambda_u, state.activations.frames(), "lambda_u");
  const double b = beta.value;
  const double eta = beta.eta();

  const Matrix p = floored_pow(state.x, b - 2.0, eps) * Y;
  const Matrix q = floored_pow(state.x, b - 1.0, eps);
  const Matrix bp = lag_corr_kernel(p, state.kernel.h);
  const Matrix bq = lag_corr_kernel(q, state.kernel.h);

  const auto &w = state.dictionary.w.matrix();
  Matrix num = (w.transpose() * bp.matrix()).array();  // J x N
  if (lambda_u.size() != 0)
    num.rowwise() -= lambda_u.transpose();
  const Matrix den = (w.transpose() * bq.matrix()).array();

  Activations out;
  // The sparsity term is subtracted before the floor and the eta power, so
  // a dominating penalty drives entries to the eps^eta scale rather than
  // through zero or a fractional power of a negative number.
  out.u = state.activations.u * num.max(eps).pow(eta) /
          den.pow(eta).max(eps);
  out.u = out.u.max(eps * out.u.maxCoeff());
  return out;
}

Eigen::ArrayXd solve_penalized_tridiagonal(const Eigen::ArrayXd &a,
                                           double lambda,
                                           const Eigen::ArrayXd &b) {
  const Eigen::Index m = a.size();
  if (b.size() != m) throw ShapeError("tridiagonal solve: size mismatch");
  if (m == 0) return {};

  if (lambda == 0.0 || m == 1) {
    // L^T L vanishes for a single tap; lambda == 0 leaves a diagonal system.
    Eigen::ArrayXd h(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (a(i) <= 0.0)
        throw InvalidParameter("tridiagonal solve: singular diagonal");
      h(i) = b(i) / a(i);
    }
    return h;
  }

  // diag(a) + 2 lambda L^T L: diagonal a + 2*lambda*(1,2,...,2,1),
  // constant off-diagonal -2*lambda.  Pivot-free LDL^T in O(m).
  const double off = -2.0 * lambda;
  Eigen::ArrayXd piv(m), l(m), z(m);
  piv(0) = a(0) + 2.0 * lambda;
  z(0) = b(0);
  for (Eigen::Index i = 1; i < m; ++i) {
    if (piv(i - 1) <= 0.0)
      throw InvalidParameter("tridiagonal solve: matrix not positive definite");
    const double diag =
        a(i) + 2.0 * lambda * ((i == m - 1) ? 1.0 : 2.0);
    l(i) = off / piv(i - 1);
    piv(i) = diag - l(i) * off;
    z(i) = b(i) - l(i) * z(i - 1);
  }
  if (piv(m - 1) <= 0.0)
    throw InvalidParameter("tridiagonal solve: matrix not positive definite");

  Eigen::ArrayXd h(m);
  h(m - 1) = z(m - 1) / piv(m - 1);
  for (Eigen::Index i = m - 2; i >= 0; --i)
    h(i) = z(i) / piv(i) - l(i + 1) * h(i + 1);
  return h;
}

ReverbKernel update_H(const ModelState &state, const Matrix &Y, Beta beta,
                      const Eigen::ArrayXd &lambda_h, double eps) {
  check_data_shape(state, Y);
  check_weight_size(lambda_h, state.x.rows(), "lambda_h");
  const Eigen::Index K = state.x.rows();
  const Eigen::Index N = state.x.cols();
  const Eigen::Index M = state.kernel.taps();

  // X carries the same beta-1 / beta-2 exponents as the W and U updates;
  // the stationary equation of the auxiliary function demands it, and for
  // beta in [1,2] (in particular the stage-2 default beta = 2) this is
  // exactly the published diagonal system.  An exact fit is then a fixed
  // point for every beta.
  const Matrix xa1 = floored_pow(state.x, beta.value - 1.0, eps);
  const Matrix xa2y = floored_pow(state.x, beta.value - 2.0, eps) * Y;
  const Matrix v = (state.dictionary.w.matrix() *
                    state.activations.u.matrix())
                       .array();

  // s1(k,m) = sum_n V(k,n) X(k,n+m)^(b-1), s2 likewise against Y X^(b-2).
  Matrix s1 = Matrix::Zero(K, M);
  Matrix s2 = Matrix::Zero(K, M);
  for (Eigen::Index m = 0; m < M && m < N; ++m) {
    s1.col(m) =
        (v.leftCols(N - m) * xa1.rightCols(N - m)).rowwise().sum();
    s2.col(m) =
        (v.leftCols(N - m) * xa2y.rightCols(N - m)).rowwise().sum();
  }

  ReverbKernel out;
  out.h = state.kernel.h;
  for (Eigen::Index k = 0; k < K; ++k) {
    if ((s1.row(k) <= 0.0).all()) {
      std::cerr << "warning: update_H: null system for band " << k
                << ", row left unchanged\n";
      continue;
    }
    const double lam = lambda_h.size() == 0 ? 0.0 : lambda_h(k);
    const Eigen::ArrayXd h_prev = out.h.row(k).transpose().max(eps);
    const Eigen::ArrayXd a = s1.row(k).transpose() / h_prev;
    const Eigen::ArrayXd b = s2.row(k).transpose();
    Eigen::ArrayXd h;
    if (lam == 0.0) {
      // Diagonal system; taps with no data support keep their value.
      h = out.h.row(k).transpose();
      for (Eigen::Index m = 0; m < M; ++m)
        if (a(m) > 0.0) h(m) = b(m) / a(m);
    } else if (a.maxCoeff() < 2.0 * lam * 1e-12) {
      // The data term has vanished under the smoothness weight; the LDL^T
      // pivots of the near-singular system are below rounding noise.  Use
      // the flat limit, the minimizer of the penalty subject to the data.
      h = Eigen::ArrayXd::Constant(M, b.sum() / a.sum());
    } else {
      h = solve_penalized_tridiagonal(a, lam, b);
    }
    // The system matrix is an M-matrix, so the exact solution is
    // nonnegative; rounding may leave tiny negatives.
    for (Eigen::Index m = 0; m < M; ++m)
      if (h(m) < 0.0 && h(m) > -1e-12) h(m) = 0.0;
    out.h.row(k) = h.transpose();
  }
  return out;
}

}  // namespace dereverb
