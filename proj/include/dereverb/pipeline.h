// include/dereverb/pipeline.h

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

#ifndef DEREVERB_PIPELINE_H_
#define DEREVERB_PIPELINE_H_

#include <cstdint>
#include <vector>

#include "dereverb/model.h"
#include "dereverb/stft.h"
#include "dereverb/updates.h"

namespace dereverb {

enum class LambdaURule { kSimulated, kRecording };

/// Two-stage configuration.  Defaults are the reference parameter set:
/// Hann 512/256, J = 64 atoms, M = 20 kernel frames, beta1 = 0.75,
/// beta2 = 2, lambda_u = mean(Y) 1e-3, lambda_h(k) = 0.3 ||Y_k||^2,
/// delta = ||Y||_F 1e-3, assuming 16 kHz input.
struct DereverbConfig {
  StftConfig stft;
  Beta beta1{0.75};
  Beta beta2{2.0};
  Eigen::Index atoms = 64;
  Eigen::Index kernel_frames = 20;
  LambdaURule lambda_u_rule = LambdaURule::kSimulated;
  double lambda_u_coeff = 1e-3;   // simulated rule scale
  double lambda_u_rec_coeff = 0.1;  // recording rule scale
  double lambda_h_coeff = 0.3;
  double delta_coeff = 1e-3;
  int max_iters_stage1 = 500;
  int max_iters_stage2 = 300;
  uint64_t rng_seed = 0;
};

struct Stage1Result {
  Dictionary dictionary;   // columns L1-normalized
  Activations activations; // scale-compensated for the normalization
  int iters = 0;
  bool converged = false;  // false means the iteration cap triggered
  std::vector<double> cost_trace;  // D_beta1(Y || W U) per iteration
};

struct Stage2Result {
  Activations activations;
  ReverbKernel kernel;  // rows Linf-normalized
  int iters = 0;
  bool converged = false;
  std::vector<double> cost_trace;  // penalized cost per iteration
  Eigen::ArrayXd lambda_u;
  Eigen::ArrayXd lambda_h;
};

struct DereverbResult {
  AudioSignal restored_signal;
  PowerSpectrogram restored_power;
  ModelState factors;
  int stage1_iters = 0;
  int stage2_iters = 0;
  bool stage1_converged = true;
  bool stage2_converged = true;
  std::vector<double> cost_trace_stage1;
  std::vector<double> cost_trace_stage2;
};

// Stage 1: freeze the kernel to a delta, zero the sparsity weights, and
// alternate the W and U multiplicative updates from a seeded uniform(0,1)
// start until ||W_t - W_{t-1}||_F^2 <= delta or the iteration cap.
Stage1Result stage1_learn_dictionary(const Matrix &Y,
                                     const DereverbConfig &config);

// Initial stage-2 kernel H(k, m) = exp(-m) (the first tap is 1).
ReverbKernel stage2_initial_kernel(Eigen::Index bands, Eigen::Index taps);

// Stage 2: keep the dictionary fixed, reset beta and the penalty weights,
// and alternate the U update with the per-band kernel solve; kernel rows
// are projected to unit max each iteration.  Stops when
// ||W U_t - W U_{t-1}||_F^2 <= delta.
Stage2Result stage2_fit(const Matrix &Y, const Dictionary &W,
                        const Activations &U_init,
                        const DereverbConfig &config);

// Representation-only fit: activations against a fixed dictionary with a
// delta kernel and no penalties (the parameter-search protocol's second
// step).  Initialized uniform(0,1) from the seed.
Activations fit_activations(const Matrix &S, const Dictionary &W, Beta beta,
                            int max_iters, double delta, uint64_t seed);

// Gain reconstruction: G = (W U) / synthesize(W, U, H) with the denominator
// floored, S_hat = G .* Y, and the signal rebuilt from S_hat under the
// observed phase.
DereverbResult reconstruct(const PowerSpectrogram &Y,
                           const ComplexSpectrogram &phase,
                           const ModelState &state);

// Full pipeline: STFT -> stage 1 -> stage 2 -> gain reconstruction.
// Deterministic for a fixed config.rng_seed.
DereverbResult dereverberate(const AudioSignal &signal,
                             const DereverbConfig &config);

}  // namespace dereverb

#endif  // DEREVERB_PIPELINE_H_
