// include/dereverb/experiments.h

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

#ifndef DEREVERB_EXPERIMENTS_H_
#define DEREVERB_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dereverb/audio.h"
#include "dereverb/pipeline.h"

namespace dereverb {

/// Synthetic room impulse response: white Gaussian taps under an
/// exponential energy decay, unit peak, direct path at tap 0.
struct SyntheticRir {
  std::vector<double> taps;
  int sample_rate = 16000;
  double t60_s = 0.45;
};

// Amplitude decay envelope exp(-3 ln(10) t / t60): 1e-3 (-60 dB) at t60.
double rir_envelope(double t_s, double t60_s);

SyntheticRir synth_rir(double t60_s, double length_s, int sample_rate,
                       uint64_t seed);

// Identity response (single unit tap), for zero-reverb control conditions.
SyntheticRir identity_rir(int sample_rate);

// Full convolution trimmed to the clean length, peak-renormalized to the
// clean signal's peak.  Sample rates must match.
AudioSignal apply_reverb(const AudioSignal &clean, const SyntheticRir &rir);

// Deterministic speech-like test signal: harmonic glides under
// syllable-rate amplitude envelopes with silences in between.
AudioSignal make_speech_like(double duration_s, int sample_rate,
                             uint64_t seed);

struct GridOptions {
  StftConfig stft;
  Eigen::Index atoms = 24;
  int max_iters = 200;
  double delta_coeff = 1e-3;
  int threads = 1;
};

/// Mean cepstral distances indexed by (beta1, beta_star).
struct GridResult {
  std::vector<double> beta1_grid;
  std::vector<double> beta_star_grid;
  Matrix mean_cd;  // beta1 along rows, beta_star along columns
  int trials = 0;
  uint64_t seed = 0;
};

// Dictionary-quality map: learn a dictionary from the reverberant power
// spectrogram at beta1 (plain NMF path, delta kernel, no penalties), fit
// activations to the clean spectrogram at beta_star, rebuild both through
// the clean phase and score the cepstral distance.  Averaged over
// trials x signals; deterministic per seed regardless of thread count.
GridResult beta_grid(const std::vector<AudioSignal> &clean_signals,
                     const SyntheticRir &rir,
                     const std::vector<double> &beta1_grid,
                     const std::vector<double> &beta_star_grid, int trials,
                     uint64_t seed, const GridOptions &options = {});

std::string grid_to_json(const GridResult &grid);
void grid_to_csv(const GridResult &grid, const std::string &path);

struct BenchmarkRow {
  double t60_s = 0.0;
  int trials = 0;
  int fwssnr_improved = 0;  // paired trials where restored beats reverberant
  double fwssnr_reverberant_mean = 0.0, fwssnr_reverberant_std = 0.0;
  double fwssnr_restored_mean = 0.0, fwssnr_restored_std = 0.0;
  double cd_reverberant_mean = 0.0, cd_reverberant_std = 0.0;
  double cd_restored_mean = 0.0, cd_restored_std = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  uint64_t seed = 0;
};

// Restoration protocol: reverberate each clean signal per condition
// (t60 <= 0 means the identity response), run the full pipeline, and
// aggregate both metrics for the reverberant and restored signals.
BenchmarkReport benchmark(const std::vector<AudioSignal> &clean_set,
                          const std::vector<double> &t60_list,
                          const DereverbConfig &config, int threads = 1);

std::string benchmark_to_json(const BenchmarkReport &report);
BenchmarkReport benchmark_from_json(const std::string &json_text);
void benchmark_to_csv(const BenchmarkReport &report, const std::string &path);

}  // namespace dereverb

#endif  // DEREVERB_EXPERIMENTS_H_
