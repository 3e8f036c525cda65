// include/dereverb/updates.h

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

#ifndef DEREVERB_UPDATES_H_
#define DEREVERB_UPDATES_H_

#include <Eigen/Core>

#include "dereverb/divergence.h"
#include "dereverb/model.h"

namespace dereverb {

// Floor used for multiplicative-update numerators and for the synthesis X
// before negative powers; a null factor entry could never regain a positive
// value under multiplicative updates.
inline constexpr double kEpsilonClamp = 1e-10;

/// Per-frame sparsity weights lambda_u (length N) and per-band smoothness
/// weights lambda_h (length K) of the penalized cost.
struct PenaltyWeights {
  Eigen::ArrayXd lambda_u;  // may be empty, meaning all-zero
  Eigen::ArrayXd lambda_h;

  static PenaltyWeights zero() { return {}; }
};

// Gram matrix L^T L of the first-difference operator, materialized as the
// symmetric tridiagonal with diagonal (1, 2, ..., 2, 1) and off-diagonal -1.
// Returned as dense for inspection; the solver uses its tridiagonal form.
Eigen::MatrixXd difference_gram(Eigen::Index taps);

// sum_k lambda_h(k) * ||first differences of H row k||^2.
double kernel_smoothness_penalty(const ReverbKernel &H,
                                 const Eigen::ArrayXd &lambda_h);

// Penalized cost f = D_beta(Y||X) + sum_{j,n} lambda_u(n) U(j,n)
//                  + sum_k lambda_h(k) ||L H_k||^2.
double cost(const ModelState &state, const Matrix &Y, Beta beta,
            const PenaltyWeights &weights);

// Multiplicative dictionary update.  Each entry is rescaled by
// ( sum X^(beta-2) Y corr / sum X^(beta-1) corr )^eta where corr is the
// causal convolution of the matching U row with the H row; the numerator is
// floored at eps before the eta power.  H and U are read from state.
Dictionary update_W(const ModelState &state, const Matrix &Y, Beta beta,
                    double eps = kEpsilonClamp);

// Multiplicative activation update with the sparsity weight subtracted
// inside the numerator before flooring and the eta power.
Activations update_U(const ModelState &state, const Matrix &Y, Beta beta,
                     const Eigen::ArrayXd &lambda_u,
                     double eps = kEpsilonClamp);

// Kernel update: per band k solve (A + 2 lambda_h(k) L^T L) h = b with A
// diagonal.  Bands whose A is null keep their previous row (a warning is
// written to stderr).  Tiny negative solution entries are clamped to zero.
ReverbKernel update_H(const ModelState &state, const Matrix &Y, Beta beta,
                      const Eigen::ArrayXd &lambda_h,
                      double eps = kEpsilonClamp);

// Solve (diag(a) + 2 lambda L^T L) h = b for a symmetric positive definite
// system, a >= 0 elementwise with at least one positive entry when
// lambda > 0 (all positive when lambda == 0).  O(M) LDL^T factorization.
Eigen::ArrayXd solve_penalized_tridiagonal(const Eigen::ArrayXd &a,
                                           double lambda,
                                           const Eigen::ArrayXd &b);

}  // namespace dereverb

#endif  // DEREVERB_UPDATES_H_
