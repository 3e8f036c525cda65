// src/pipeline.cc

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

#include "dereverb/pipeline.h"

#include <cmath>
#include <iostream>
#include <random>

namespace dereverb {

namespace {

Matrix random_uniform(Eigen::Index rows, Eigen::Index cols,
                      std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
  return m;
}

double frobenius(const Matrix &m) { return std::sqrt(m.square().sum()); }

// Unit-max projection of the kernel rows, no compensation.
void project_kernel_rows(ReverbKernel &h) {
  for (Eigen::Index k = 0; k < h.bands(); ++k) {
    const double m = h.h.row(k).maxCoeff();
    if (m <= 0.0) {
      std::cerr << "warning: stage2: zero kernel row " << k
                << " left unprojected\n";
      continue;
    }
    h.h.row(k) /= m;
  }
}

}  // namespace

Stage1Result stage1_learn_dictionary(const Matrix &Y,
                                     const DereverbConfig &config) {
  if (Y.size() == 0 || (Y <= 0.0).all())
    throw DegenerateInput("stage1: spectrogram carries no energy");
  const Eigen::Index K = Y.rows();
  const Eigen::Index N = Y.cols();
  const Eigen::Index J = config.atoms;
  if (J < 1) throw InvalidParameter("stage1: atom count < 1");

  std::mt19937_64 rng(config.rng_seed);
  ModelState state(Dictionary{random_uniform(K, J, rng)},
                   Activations{random_uniform(J, N, rng)},
                   delta_kernel(K, config.kernel_frames));

  // The factors iterate unnormalized, on the data scale, so the stopping
  // threshold delta = ||Y||_F * 1e-3 is commensurate with the W steps; the
  // unit-column constraint is applied to the returned dictionary with the
  // scales folded into U (synthesis unchanged).
  const double delta = frobenius(Y) * config.delta_coeff;
  const Eigen::ArrayXd no_lambda;
  const PenaltyWeights no_weights;

  Stage1Result res;
  res.cost_trace.reserve(static_cast<size_t>(config.max_iters_stage1));
  for (int t = 0; t < config.max_iters_stage1; ++t) {
    const Matrix w_prev = state.dictionary.w;
    state.dictionary = update_W(state, Y, config.beta1);
    state.resync();
    state.activations = update_U(state, Y, config.beta1, no_lambda);
    state.resync();
    res.iters = t + 1;
    res.cost_trace.push_back(cost(state, Y, config.beta1, no_weights));
    if ((state.dictionary.w - w_prev).square().sum() <= delta) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged)
    std::cerr << "warning: stage1 hit the iteration cap (" << res.iters
              << ")\n";
  normalize(state);
  res.dictionary = state.dictionary;
  res.activations = state.activations;
  return res;
}

ReverbKernel stage2_initial_kernel(Eigen::Index bands, Eigen::Index taps) {
  ReverbKernel h;
  h.h.resize(bands, taps);
  for (Eigen::Index m = 0; m < taps; ++m)
    h.h.col(m).setConstant(std::exp(static_cast<double>(-m)));
  return h;
}

Stage2Result stage2_fit(const Matrix &Y, const Dictionary &W,
                        const Activations &U_init,
                        const DereverbConfig &config) {
  const Eigen::Index K = Y.rows();
  const Eigen::Index N = Y.cols();
  if (W.bands() != K) throw ShapeError("stage2: W band count != Y rows");
  if (U_init.atoms() != W.atoms() || U_init.frames() != N)
    throw ShapeError("stage2: U shape mismatch");

  Stage2Result res;
  const double mean_y = Y.mean();
  switch (config.lambda_u_rule) {
    case LambdaURule::kSimulated:
      res.lambda_u = Eigen::ArrayXd::Constant(N, mean_y * config.lambda_u_coeff);
      break;
    case LambdaURule::kRecording: {
      // Reset against the stage-1 activation mass per frame; silent frames
      // draw a large penalty, suppressing noise between words.
      res.lambda_u.resize(N);
      for (Eigen::Index n = 0; n < N; ++n) {
        const double mass = std::max(U_init.u.col(n).sum(), kEpsilonClamp);
        res.lambda_u(n) = mean_y / mass * config.lambda_u_rec_coeff;
      }
      break;
    }
  }
  res.lambda_h = config.lambda_h_coeff * Y.square().rowwise().sum();

  ModelState state(W, U_init, stage2_initial_kernel(K, config.kernel_frames));
  const double delta = frobenius(Y) * config.delta_coeff;
  const PenaltyWeights weights{res.lambda_u, res.lambda_h};

  Matrix s_prev = (W.w.matrix() * U_init.u.matrix()).array();
  res.cost_trace.reserve(static_cast<size_t>(config.max_iters_stage2));
  for (int t = 0; t < config.max_iters_stage2; ++t) {
    state.activations = update_U(state, Y, config.beta2, res.lambda_u);
    state.resync();
    state.kernel = update_H(state, Y, config.beta2, res.lambda_h);
    project_kernel_rows(state.kernel);
    state.resync();
    res.iters = t + 1;
    res.cost_trace.push_back(cost(state, Y, config.beta2, weights));
    const Matrix s = (W.w.matrix() * state.activations.u.matrix()).array();
    const double step = (s - s_prev).square().sum();
    s_prev = s;
    if (step <= delta) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged)
    std::cerr << "warning: stage2 hit the iteration cap (" << res.iters
              << ")\n";
  res.activations = state.activations;
  res.kernel = state.kernel;
  return res;
}

Activations fit_activations(const Matrix &S, const Dictionary &W, Beta beta,
                            int max_iters, double delta, uint64_t seed) {
  const Eigen::Index K = S.rows();
  const Eigen::Index N = S.cols();
  if (W.bands() != K) throw ShapeError("fit_activations: band mismatch");

  std::mt19937_64 rng(seed);
  ModelState state(W, Activations{random_uniform(W.atoms(), N, rng)},
                   delta_kernel(K, 1));
  const Eigen::ArrayXd no_lambda;
  Matrix s_prev = state.x;
  for (int t = 0; t < max_iters; ++t) {
    state.activations = update_U(state, S, beta, no_lambda);
    state.resync();
    if ((state.x - s_prev).square().sum() <= delta) break;
    s_prev = state.x;
  }
  return state.activations;
}

DereverbResult reconstruct(const PowerSpectrogram &Y,
                           const ComplexSpectrogram &phase,
                           const ModelState &state) {
  if (Y.values.rows() != state.x.rows() || Y.values.cols() != state.x.cols())
    throw ShapeError("reconstruct: spectrogram and model shapes differ");

  const Matrix v =
      (state.dictionary.w.matrix() * state.activations.u.matrix()).array();
  const Matrix gain = v / state.x.max(kEpsilonClamp);

  DereverbResult res;
  res.factors = state;
  res.restored_power.values = gain * Y.values;
  res.restored_power.config = Y.config;
  res.restored_power.sample_rate = Y.sample_rate;
  res.restored_power.original_len = Y.original_len;
  res.restored_signal = istft(res.restored_power, phase);
  return res;
}

DereverbResult dereverberate(const AudioSignal &signal,
                             const DereverbConfig &config) {
  if (static_cast<Eigen::Index>(signal.samples.size()) <
      config.stft.window_len)
    throw InsufficientData("dereverberate: signal shorter than one window");

  const ComplexSpectrogram spec = stft_forward(signal, config.stft);
  const PowerSpectrogram y = power_spectrogram(spec);

  Stage1Result s1 = stage1_learn_dictionary(y.values, config);
  Stage2Result s2 = stage2_fit(y.values, s1.dictionary, s1.activations,
                               config);

  ModelState state(std::move(s1.dictionary), std::move(s2.activations),
                   std::move(s2.kernel));
  DereverbResult res = reconstruct(y, spec, state);
  res.stage1_iters = s1.iters;
  res.stage2_iters = s2.iters;
  res.stage1_converged = s1.converged;
  res.stage2_converged = s2.converged;
  res.cost_trace_stage1 = std::move(s1.cost_trace);
  res.cost_trace_stage2 = std::move(s2.cost_trace);
  return res;
}

}  // namespace dereverb
