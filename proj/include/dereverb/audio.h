// include/dereverb/audio.h

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

#ifndef DEREVERB_AUDIO_H_
#define DEREVERB_AUDIO_H_

#include <string>
#include <vector>

#include "dereverb/errors.h"

namespace dereverb {

/// Mono time-domain signal, nominal amplitude range [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Read a RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit).  Multichannel
// files yield channel 0 with a warning on stderr.  PCM samples are scaled
// by 1/32768.
AudioSignal read_wav(const std::string &path);

// Write mono PCM 16-bit.  Samples are clipped to [-1, 1] before
// quantization (scale 32768, clamped to the int16 range).
void write_wav(const AudioSignal &signal, const std::string &path);

// Linear-phase FIR high pass (Hamming-windowed sinc, spectral inversion of
// the matching low pass).  taps is bumped to the next odd count; the group
// delay of (taps-1)/2 samples is compensated so output length equals input
// length.  Edges are extended by replication, so a constant signal maps to
// (numerically) zero everywhere.
AudioSignal highpass_filter(const AudioSignal &signal, int taps,
                            double cutoff_hz);

// Linear convolution through one zero-padded FFT pair; output length is
// x.size() + kernel.size() - 1.
std::vector<double> fft_convolve(const std::vector<double> &x,
                                 const std::vector<double> &kernel);

}  // namespace dereverb

#endif  // DEREVERB_AUDIO_H_
