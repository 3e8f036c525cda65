// include/dereverb/metrics.h

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

#ifndef DEREVERB_METRICS_H_
#define DEREVERB_METRICS_H_

#include <vector>

#include "dereverb/audio.h"

namespace dereverb {

/// Frequency-weighted segmental SNR configuration (Hu-Loizou style).
/// 25 ms frames at 75% overlap, 25 mel-spaced triangular bands, band
/// weights proportional to the clean band magnitude raised to 0.2,
/// per-frame values clamped to [-10, 35] dB before averaging.
struct FwssnrConfig {
  double frame_ms = 25.0;
  double overlap = 0.75;
  int num_bands = 25;
  double weight_gamma = 0.2;
  double clamp_lo_db = -10.0;
  double clamp_hi_db = 35.0;
};

/// Cepstral distance configuration: order-10 LPC, the first 16 cepstral
/// coefficients with the gain term excluded, frames as above, and the
/// conventional 10/ln(10) * sqrt(2) scaling.  Per-frame values are capped
/// at frame_cap and the largest (1 - trim_fraction) tail is discarded
/// before averaging, as in the reference implementation.
struct CepstralConfig {
  double frame_ms = 25.0;
  double overlap = 0.75;
  int lpc_order = 10;
  int num_coeffs = 16;
  double frame_cap = 10.0;
  double trim_fraction = 0.95;
};

struct MetricReport {
  double fwssnr_db = 0.0;
  double cepstral_distance = 0.0;
  std::vector<double> fwssnr_frames;
  std::vector<double> cepstral_frames;
};

// Both metrics trim the inputs to the shorter length and require equal
// sample rates (InvalidParameter otherwise) and at least one full frame
// (InsufficientData otherwise).

double fwssnr(const AudioSignal &clean, const AudioSignal &test,
              const FwssnrConfig &config = {});

// Frame-averaged L2 distance between LPC cepstra; symmetric in its
// arguments and zero for identical signals.
double cepstral_distance(const AudioSignal &clean, const AudioSignal &test,
                         const CepstralConfig &config = {});

MetricReport compute_metrics(const AudioSignal &clean,
                             const AudioSignal &test);

}  // namespace dereverb

#endif  // DEREVERB_METRICS_H_
