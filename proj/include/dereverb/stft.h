// include/dereverb/stft.h

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

#ifndef DEREVERB_STFT_H_
#define DEREVERB_STFT_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dereverb/audio.h"
#include "dereverb/divergence.h"

namespace dereverb {

enum class WindowKind { kHann };

struct StftConfig {
  Eigen::Index window_len = 512;
  Eigen::Index hop = 256;
  WindowKind window = WindowKind::kHann;

  Eigen::Index bands() const { return window_len / 2 + 1; }
  void validate() const;
};

/// One-sided complex STFT, K x N with K = window_len/2 + 1.  Frames are
/// left-aligned on a buffer padded by window_len - hop zeros in front (and
/// zeros behind), so every input sample lies under full analysis weight:
/// N = ceil((len + window_len - hop) / hop).
struct ComplexSpectrogram {
  Eigen::ArrayXXcd values;
  StftConfig config;
  int sample_rate = 16000;
  Eigen::Index original_len = 0;

  Eigen::Index bands() const { return values.rows(); }
  Eigen::Index frames() const { return values.cols(); }
};

/// Squared STFT magnitudes, same layout and metadata.
struct PowerSpectrogram {
  Matrix values;
  StftConfig config;
  int sample_rate = 16000;
  Eigen::Index original_len = 0;

  Eigen::Index bands() const { return values.rows(); }
  Eigen::Index frames() const { return values.cols(); }
};

// Periodic window of the given kind (periodic Hann satisfies COLA at
// hop = window_len / 2).
std::vector<double> make_window(WindowKind kind, Eigen::Index len);

ComplexSpectrogram stft_forward(const AudioSignal &signal,
                                const StftConfig &config);

PowerSpectrogram power_spectrogram(const ComplexSpectrogram &c);

// Inverse transform of sqrt(power) combined with the unit phasors of
// phase_source (a zero phasor is taken as 1).  Weighted overlap-add with
// exact per-sample window-energy normalization; the result is trimmed to
// original_len.
AudioSignal istft(const PowerSpectrogram &power,
                  const ComplexSpectrogram &phase_source);

// Plain CSV, one text row per frequency band k, one column per frame n.
void export_csv(const PowerSpectrogram &power, const std::string &path);

}  // namespace dereverb

#endif  // DEREVERB_STFT_H_
