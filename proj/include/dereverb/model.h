// include/dereverb/model.h

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

#ifndef DEREVERB_MODEL_H_
#define DEREVERB_MODEL_H_

#include <string>

#include "dereverb/divergence.h"
#include "dereverb/errors.h"

namespace dereverb {

/// Spectral dictionary W, K x J, nonnegative.  After normalize() every
/// column sums to one.
struct Dictionary {
  Matrix w;

  Eigen::Index bands() const { return w.rows(); }
  Eigen::Index atoms() const { return w.cols(); }
};

/// Time-varying atom gains U, J x N, nonnegative.
struct Activations {
  Matrix u;

  Eigen::Index atoms() const { return u.rows(); }
  Eigen::Index frames() const { return u.cols(); }
};

/// Sub-band reverberation filters H, K x M, power domain.  After
/// normalize() every row has max entry one (reverberation preserves the
/// signal's maximal energy).
struct ReverbKernel {
  Matrix h;

  Eigen::Index bands() const { return h.rows(); }
  Eigen::Index taps() const { return h.cols(); }
};

// Kernel with h(:,0) = 1 and all later taps zero; synthesize() with it
// reduces to the plain product W U.
ReverbKernel delta_kernel(Eigen::Index bands, Eigen::Index taps);

// X(k,n) = sum_{m=0}^{min(M-1,n)} sum_j W(k,j) U(j,n-m) H(k,m).
// Truncated causal convolution: lags reaching before the first frame
// contribute nothing.
Matrix synthesize(const Dictionary &W, const Activations &U,
                  const ReverbKernel &H);

/// Full factor state with the cached synthesis X.
struct ModelState {
  Dictionary dictionary;
  Activations activations;
  ReverbKernel kernel;
  Matrix x;  // cached synthesize(dictionary, activations, kernel)

  ModelState() = default;
  ModelState(Dictionary w, Activations u, ReverbKernel h);

  // Recompute the cached synthesis after a factor change.
  void resync();

  // Debug-build check that the cache matches the factors.
  void assert_consistent() const;
};

// Project onto the constraint set: W columns to unit L1 norm with the
// scales multiplied into the matching U rows (synthesis preserved exactly),
// H rows to unit Linf norm with no compensation (constraint projection).
// Throws DegenerateFactor on an all-zero W column or H row.
void normalize(ModelState &state);

// Factor checkpoint, schema {schema_version, K, N, J, M, W, U, H row-major}.
std::string factors_to_json(const ModelState &state);
ModelState factors_from_json(const std::string &json_text);
void dump_factors(const ModelState &state, const std::string &path);
ModelState load_factors(const std::string &path);

}  // namespace dereverb

#endif  // DEREVERB_MODEL_H_
