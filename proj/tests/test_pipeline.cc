// tests/test_pipeline.cc

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dereverb/experiments.h"
#include "dereverb/metrics.h"
#include "dereverb/pipeline.h"

using dereverb::Activations;
using dereverb::Beta;
using dereverb::DereverbConfig;
using dereverb::DereverbResult;
using dereverb::Dictionary;
using dereverb::Matrix;
using dereverb::ModelState;
using dereverb::ReverbKernel;

namespace {

Matrix random_positive(Eigen::Index rows, Eigen::Index cols, uint64_t seed,
                       double lo = 0.05, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
  return m;
}

Matrix mean_baseline(const Matrix &y) {
  return Matrix::Constant(y.rows(), y.cols(), y.mean());
}

// Planted convolutive model: band-localized atoms (identifiable), sparse
// activations and decaying kernel rows.
ModelState planted_model(Eigen::Index K, Eigen::Index N, Eigen::Index J,
                         Eigen::Index M, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  Matrix w = random_positive(K, J, seed + 1, 0.01, 1.0);
  for (Eigen::Index j = 0; j < J; ++j) {
    const double center = (j + 0.5) * static_cast<double>(K) / J;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double d = (k - center) / (K / 4.0);
      w(k, j) = w(k, j) * std::exp(-0.5 * d * d) + 1e-3;
    }
  }
  Matrix u = random_positive(J, N, seed + 2, 0.0, 1.0);
  for (Eigen::Index c = 0; c < N; ++c)
    for (Eigen::Index r = 0; r < J; ++r)
      if (uni(rng) < 0.7) u(r, c) *= 0.02;  // sparse activations
  Matrix h(K, M);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index m = 0; m < M; ++m)
      h(k, m) = std::exp(-0.7 * static_cast<double>(m)) *
                (0.6 + 0.4 * uni(rng));
  h.col(0).setOnes();
  ModelState state(Dictionary{w}, Activations{u}, ReverbKernel{h});
  dereverb::normalize(state);
  return state;
}

bool non_increasing(const std::vector<double> &trace, double rel_slack) {
  for (size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] + rel_slack * (1.0 + std::abs(trace[i - 1])))
      return false;
  return true;
}

}  // namespace

TEST_CASE("stage 1 recovers a planted factorization", "[pipeline]") {
  const Eigen::Index K = 24, N = 60, J = 4;
  const Matrix w0 = random_positive(K, J, 51, 0.01, 1.0);
  const Matrix u0 = random_positive(J, N, 52, 0.0, 1.0);
  const Matrix y = (w0.matrix() * u0.matrix()).array() + 1e-6;

  DereverbConfig cfg;
  cfg.atoms = J;
  cfg.beta1 = Beta(0.75);
  cfg.max_iters_stage1 = 1500;
  cfg.delta_coeff = 1e-8;  // planted data: stop on the cap, not the step
  cfg.rng_seed = 7;
  const auto res = dereverb::stage1_learn_dictionary(y, cfg);

  const Matrix fit =
      (res.dictionary.w.matrix() * res.activations.u.matrix()).array();
  const double d_fit = dereverb::beta_divergence(y, fit, cfg.beta1);
  const double d_base =
      dereverb::beta_divergence(y, mean_baseline(y), cfg.beta1);
  CHECK(d_fit <= 1e-3 * d_base);
  for (Eigen::Index j = 0; j < J; ++j)
    CHECK(res.dictionary.w.col(j).sum() == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(non_increasing(res.cost_trace, 1e-9));
}

TEST_CASE("stage 1 rejects an all-zero spectrogram", "[pipeline]") {
  DereverbConfig cfg;
  cfg.atoms = 3;
  CHECK_THROWS_AS(
      dereverb::stage1_learn_dictionary(Matrix::Zero(10, 20), cfg),
      dereverb::DegenerateInput);
}

TEST_CASE("stage 2 initial kernel follows exp(1 - n)", "[pipeline]") {
  const ReverbKernel h = dereverb::stage2_initial_kernel(5, 8);
  for (Eigen::Index k = 0; k < 5; ++k)
    for (Eigen::Index m = 0; m < 8; ++m)
      CHECK(h.h(k, m) ==
            Catch::Approx(std::exp(-static_cast<double>(m))).epsilon(1e-12));
  CHECK(h.h.col(0).maxCoeff() == Catch::Approx(1.0));
}

TEST_CASE("stage 2 fits a planted reverberant model", "[pipeline]") {
  const Eigen::Index K = 32, N = 80, J = 5, M = 6;
  const ModelState truth = planted_model(K, N, J, M, 61);
  const Matrix y = truth.x + 1e-8;

  DereverbConfig cfg;
  cfg.atoms = J;
  cfg.kernel_frames = M;
  cfg.rng_seed = 13;
  cfg.max_iters_stage1 = 1200;
  cfg.max_iters_stage2 = 600;
  // Noise-free planted data: no regularization, run to the caps.
  cfg.lambda_u_coeff = 0.0;
  cfg.lambda_h_coeff = 0.0;
  cfg.delta_coeff = 1e-8;

  const auto s1 = dereverb::stage1_learn_dictionary(y, cfg);
  const auto s2 = dereverb::stage2_fit(y, s1.dictionary, s1.activations, cfg);

  ModelState fitted(s1.dictionary, s2.activations, s2.kernel);
  const double d_fit = dereverb::beta_divergence(y, fitted.x, cfg.beta2);
  const double d_base =
      dereverb::beta_divergence(y, mean_baseline(y), cfg.beta2);
  CHECK(d_fit <= 1e-2 * d_base);

  // Kernel rows are unit-max and decay on average.
  double first = 0.0, last = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    CHECK(s2.kernel.h.row(k).maxCoeff() == Catch::Approx(1.0).epsilon(1e-9));
    first += s2.kernel.h(k, 0);
    last += s2.kernel.h(k, M - 1);
  }
  CHECK(last < first);
  CHECK(non_increasing(s2.cost_trace, 1e-6));
}

TEST_CASE("reconstruct with a delta kernel returns the observation",
          "[pipeline]") {
  const Eigen::Index K = 257;
  dereverb::AudioSignal sig = dereverb::make_speech_like(1.0, 16000, 3);
  const auto spec = dereverb::stft_forward(sig, dereverb::StftConfig{});
  const auto y = dereverb::power_spectrogram(spec);

  ModelState state(Dictionary{random_positive(K, 4, 71, 0.01, 1.0)},
                   Activations{random_positive(4, y.frames(), 72)},
                   dereverb::delta_kernel(K, 10));
  const DereverbResult res = dereverb::reconstruct(y, spec, state);
  CHECK((res.restored_power.values - y.values).abs().maxCoeff() <= 1e-12);

  // The restored signal is then just the ISTFT round trip of Y.
  const dereverb::AudioSignal direct = dereverb::istft(y, spec);
  for (size_t i = 0; i < direct.samples.size(); ++i)
    CHECK(res.restored_signal.samples[i] ==
          Catch::Approx(direct.samples[i]).margin(1e-12));
}

TEST_CASE("gain is positive wherever the data and atoms are active",
          "[pipeline]") {
  const ModelState truth = planted_model(16, 40, 3, 4, 81);
  const Matrix y = truth.x + 1e-9;
  const Matrix v =
      (truth.dictionary.w.matrix() * truth.activations.u.matrix()).array();
  const Matrix gain = v / truth.x.max(dereverb::kEpsilonClamp);
  for (Eigen::Index k = 0; k < y.rows(); ++k)
    for (Eigen::Index n = 0; n < y.cols(); ++n)
      if (y(k, n) > 0.0 && v(k, n) > 0.0) CHECK(gain(k, n) > 0.0);
}

TEST_CASE("pipeline is deterministic under a fixed seed", "[pipeline]") {
  const dereverb::AudioSignal sig = dereverb::make_speech_like(1.0, 16000, 5);
  DereverbConfig cfg;
  cfg.atoms = 16;
  cfg.kernel_frames = 8;
  cfg.max_iters_stage1 = 40;
  cfg.max_iters_stage2 = 25;
  cfg.rng_seed = 99;

  const DereverbResult a = dereverb::dereverberate(sig, cfg);
  const DereverbResult b = dereverb::dereverberate(sig, cfg);
  CHECK((a.factors.dictionary.w == b.factors.dictionary.w).all());
  CHECK((a.factors.activations.u == b.factors.activations.u).all());
  CHECK((a.factors.kernel.h == b.factors.kernel.h).all());
  REQUIRE(a.restored_signal.samples.size() ==
          b.restored_signal.samples.size());
  for (size_t i = 0; i < a.restored_signal.samples.size(); ++i)
    CHECK(a.restored_signal.samples[i] == b.restored_signal.samples[i]);

  DereverbConfig other = cfg;
  other.rng_seed = 100;
  const DereverbResult c = dereverb::dereverberate(sig, other);
  CHECK_FALSE((a.factors.dictionary.w == c.factors.dictionary.w).all());
}

TEST_CASE("pipeline approximately preserves an anechoic signal", "[pipeline]") {
  const dereverb::AudioSignal sig = dereverb::make_speech_like(1.5, 16000, 8);
  DereverbConfig cfg;
  cfg.atoms = 32;
  cfg.kernel_frames = 10;
  cfg.lambda_h_coeff = 0.003;  // desk-scale smoothness calibration
  cfg.rng_seed = 21;
  const DereverbResult res = dereverb::dereverberate(sig, cfg);
  CHECK(dereverb::fwssnr(sig, res.restored_signal) >= 20.0);
}

TEST_CASE("recording mode penalizes silent frames harder", "[pipeline]") {
  const ModelState truth = planted_model(16, 50, 3, 4, 91);
  const Matrix y = truth.x + 1e-9;
  DereverbConfig cfg;
  cfg.atoms = 3;
  cfg.kernel_frames = 4;
  cfg.max_iters_stage2 = 5;
  cfg.lambda_u_rule = dereverb::LambdaURule::kRecording;

  Activations u_init = truth.activations;
  u_init.u.col(7).setZero();  // a silent stage-1 frame
  const auto s2 = dereverb::stage2_fit(y, truth.dictionary, u_init, cfg);
  REQUIRE(s2.lambda_u.size() == 50);
  CHECK(s2.lambda_u(7) > s2.lambda_u(6));
  CHECK(s2.lambda_u(7) > 1e3 * s2.lambda_u.minCoeff());
}

TEST_CASE("dereverberate rejects too-short input", "[pipeline]") {
  dereverb::AudioSignal tiny;
  tiny.sample_rate = 16000;
  tiny.samples.assign(100, 0.1);
  CHECK_THROWS_AS(dereverb::dereverberate(tiny, DereverbConfig{}),
                  dereverb::InsufficientData);
}

TEST_CASE("fit_activations represents a spectrogram over a fixed dictionary",
          "[pipeline]") {
  const Eigen::Index K = 20, N = 40, J = 4;
  const Matrix w0 = random_positive(K, J, 95, 0.01, 1.0);
  Dictionary w{w0};
  for (Eigen::Index j = 0; j < J; ++j) w.w.col(j) /= w.w.col(j).sum();
  const Matrix u0 = random_positive(J, N, 96, 0.0, 1.0);
  const Matrix s = (w.w.matrix() * u0.matrix()).array() + 1e-9;

  const Activations fit = dereverb::fit_activations(
      s, w, Beta(2.0), 400, 1e-10 * s.square().sum(), 7);
  const Matrix s_hat = (w.w.matrix() * fit.u.matrix()).array();
  const double d_fit = dereverb::beta_divergence(s, s_hat, Beta(2.0));
  const double d_base =
      dereverb::beta_divergence(s, mean_baseline(s), Beta(2.0));
  CHECK(d_fit <= 1e-3 * d_base);
}
