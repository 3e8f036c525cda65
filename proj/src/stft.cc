// src/stft.cc

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

#include "dereverb/stft.h"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace dereverb {

void StftConfig::validate() const {
  if (window_len < 2) throw InvalidParameter("stft: window_len < 2");
  if (hop < 1 || hop > window_len)
    throw InvalidParameter("stft: hop must be in (0, window_len]");
}

std::vector<double> make_window(WindowKind kind, Eigen::Index len) {
  std::vector<double> w(static_cast<size_t>(len));
  switch (kind) {
    case WindowKind::kHann:
      for (Eigen::Index i = 0; i < len; ++i)
        w[static_cast<size_t>(i)] =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / len));
      break;
  }
  return w;
}

ComplexSpectrogram stft_forward(const AudioSignal &signal,
                                const StftConfig &config) {
  config.validate();
  if (signal.samples.empty()) throw EmptyInput("stft_forward: empty signal");

  const Eigen::Index len = static_cast<Eigen::Index>(signal.samples.size());
  const Eigen::Index L = config.window_len;
  const Eigen::Index hop = config.hop;
  const Eigen::Index pad_left = L - hop;
  const Eigen::Index n_frames = (len + pad_left + hop - 1) / hop;
  const Eigen::Index padded_len = (n_frames - 1) * hop + L;

  std::vector<double> padded(static_cast<size_t>(padded_len), 0.0);
  std::copy(signal.samples.begin(), signal.samples.end(),
            padded.begin() + pad_left);
  const std::vector<double> w = make_window(config.window, L);

  ComplexSpectrogram out;
  out.config = config;
  out.sample_rate = signal.sample_rate;
  out.original_len = len;
  out.values.resize(config.bands(), n_frames);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<size_t>(L));
  std::vector<std::complex<double>> spec;
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    const size_t off = static_cast<size_t>(t * hop);
    for (Eigen::Index i = 0; i < L; ++i)
      frame[static_cast<size_t>(i)] =
          padded[off + static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
    fft.fwd(spec, frame);
    for (Eigen::Index k = 0; k < config.bands(); ++k)
      out.values(k, t) = spec[static_cast<size_t>(k)];
  }
  return out;
}

PowerSpectrogram power_spectrogram(const ComplexSpectrogram &c) {
  PowerSpectrogram p;
  p.values = c.values.abs2();
  p.config = c.config;
  p.sample_rate = c.sample_rate;
  p.original_len = c.original_len;
  return p;
}

AudioSignal istft(const PowerSpectrogram &power,
                  const ComplexSpectrogram &phase_source) {
  if (power.values.rows() != phase_source.values.rows() ||
      power.values.cols() != phase_source.values.cols())
    throw ShapeError("istft: power and phase shapes differ");
  const StftConfig &config = power.config;
  config.validate();

  const Eigen::Index K = power.bands();
  const Eigen::Index n_frames = power.frames();
  const Eigen::Index L = config.window_len;
  const Eigen::Index hop = config.hop;
  const Eigen::Index pad_left = L - hop;
  const Eigen::Index padded_len = (n_frames - 1) * hop + L;
  if (K != config.bands()) throw ShapeError("istft: band count != L/2+1");

  const std::vector<double> w = make_window(config.window, L);
  std::vector<double> acc(static_cast<size_t>(padded_len), 0.0);
  std::vector<double> wsum(static_cast<size_t>(padded_len), 0.0);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec(static_cast<size_t>(K));
  std::vector<double> frame;
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      const std::complex<double> v = phase_source.values(k, t);
      const double mag = std::sqrt(std::max(power.values(k, t), 0.0));
      const double vabs = std::abs(v);
      spec[static_cast<size_t>(k)] =
          vabs == 0.0 ? std::complex<double>(mag, 0.0) : v / vabs * mag;
    }
    fft.inv(frame, spec, L);
    const size_t off = static_cast<size_t>(t * hop);
    for (Eigen::Index i = 0; i < L; ++i) {
      const size_t s = off + static_cast<size_t>(i);
      acc[s] += frame[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
      wsum[s] += w[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
    }
  }

  AudioSignal out;
  out.sample_rate = power.sample_rate;
  const Eigen::Index n = power.original_len;
  out.samples.resize(static_cast<size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const size_t s = static_cast<size_t>(i + pad_left);
    if (s < acc.size() && wsum[s] > 1e-12) out.samples[i] = acc[s] / wsum[s];
  }
  return out;
}

void export_csv(const PowerSpectrogram &power, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (Eigen::Index k = 0; k < power.bands(); ++k) {
    for (Eigen::Index n = 0; n < power.frames(); ++n) {
      if (n) out << ',';
      out << power.values(k, n);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dereverb
