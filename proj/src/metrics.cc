// src/metrics.cc

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

#include "dereverb/metrics.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace dereverb {

namespace {

struct Framing {
  int frame_len;
  int hop;
  int num_frames;
};

Framing make_framing(size_t signal_len, int sample_rate, double frame_ms,
                     double overlap) {
  Framing f;
  f.frame_len = static_cast<int>(std::lround(frame_ms * 1e-3 * sample_rate));
  f.hop = std::max(1, static_cast<int>(std::lround(f.frame_len *
                                                   (1.0 - overlap))));
  if (signal_len < static_cast<size_t>(f.frame_len))
    throw InsufficientData("metrics: signal shorter than one frame");
  f.num_frames =
      1 + static_cast<int>((signal_len - f.frame_len) / f.hop);
  return f;
}

size_t common_length(const AudioSignal &a, const AudioSignal &b) {
  if (a.sample_rate != b.sample_rate)
    throw InvalidParameter("metrics: sample rates differ");
  return std::min(a.samples.size(), b.samples.size());
}

// Triangular mel filterbank over the one-sided power spectrum.
std::vector<std::vector<double>> mel_filterbank(int num_bands, int nfft,
                                                int sample_rate) {
  auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto hz = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  const int bins = nfft / 2 + 1;
  const double mel_max = mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<size_t>(num_bands) + 2);
  for (int i = 0; i < num_bands + 2; ++i)
    edges[static_cast<size_t>(i)] = hz(mel_max * i / (num_bands + 1));

  std::vector<std::vector<double>> bank(static_cast<size_t>(num_bands),
                                        std::vector<double>(bins, 0.0));
  for (int j = 0; j < num_bands; ++j) {
    const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / nfft;
      double v = 0.0;
      if (f > lo && f < mid)
        v = (f - lo) / (mid - lo);
      else if (f >= mid && f < hi)
        v = (hi - f) / (hi - mid);
      bank[static_cast<size_t>(j)][static_cast<size_t>(k)] = v;
    }
  }
  return bank;
}

std::vector<double> band_magnitudes(
    const std::vector<double> &frame, Eigen::FFT<double> &fft, int nfft,
    const std::vector<std::vector<double>> &bank) {
  std::vector<double> padded(static_cast<size_t>(nfft), 0.0);
  std::copy(frame.begin(), frame.end(), padded.begin());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  const int bins = nfft / 2 + 1;
  std::vector<double> power(static_cast<size_t>(bins));
  for (int k = 0; k < bins; ++k)
    power[static_cast<size_t>(k)] = std::norm(spec[static_cast<size_t>(k)]);
  std::vector<double> mags(bank.size());
  for (size_t j = 0; j < bank.size(); ++j) {
    double e = 0.0;
    for (int k = 0; k < bins; ++k)
      e += bank[j][static_cast<size_t>(k)] * power[static_cast<size_t>(k)];
    mags[j] = std::sqrt(e);
  }
  return mags;
}

// Levinson-Durbin; returns false when the frame is (numerically) silent or
// the recursion degenerates.
bool lpc_from_frame(const std::vector<double> &frame, int order,
                    std::vector<double> &a) {
  const int n = static_cast<int>(frame.size());
  std::vector<double> r(static_cast<size_t>(order) + 1, 0.0);
  for (int lag = 0; lag <= order; ++lag) {
    double acc = 0.0;
    for (int i = lag; i < n; ++i)
      acc += frame[static_cast<size_t>(i)] *
             frame[static_cast<size_t>(i - lag)];
    r[static_cast<size_t>(lag)] = acc;
  }
  if (r[0] <= 1e-20) return false;
  r[0] *= 1.0 + 1e-9;  // tiny ridge keeps marginal frames solvable

  a.assign(static_cast<size_t>(order) + 1, 0.0);
  a[0] = 1.0;
  double err = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[static_cast<size_t>(i)];
    for (int j = 1; j < i; ++j)
      acc += a[static_cast<size_t>(j)] * r[static_cast<size_t>(i - j)];
    const double k = -acc / err;
    std::vector<double> prev(a.begin(), a.begin() + i);
    for (int j = 1; j < i; ++j)
      a[static_cast<size_t>(j)] =
          prev[static_cast<size_t>(j)] + k * prev[static_cast<size_t>(i - j)];
    a[static_cast<size_t>(i)] = k;
    err *= 1.0 - k * k;
    if (err <= 0.0) return false;
  }
  return true;
}

// Cepstrum of the all-pole model 1/A(z); c[0] unused (gain excluded).
std::vector<double> lpc_cepstrum(const std::vector<double> &a, int order,
                                 int num_coeffs) {
  std::vector<double> c(static_cast<size_t>(num_coeffs) + 1, 0.0);
  for (int n = 1; n <= num_coeffs; ++n) {
    double acc = n <= order ? -a[static_cast<size_t>(n)] : 0.0;
    const int k_lo = std::max(1, n - order);
    for (int k = k_lo; k < n; ++k)
      acc -= (static_cast<double>(k) / n) * c[static_cast<size_t>(k)] *
             a[static_cast<size_t>(n - k)];
    c[static_cast<size_t>(n)] = acc;
  }
  return c;
}

std::vector<double> hamming(int len) {
  std::vector<double> w(static_cast<size_t>(len));
  for (int i = 0; i < len; ++i)
    w[static_cast<size_t>(i)] =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (len - 1));
  return w;
}

std::vector<double> cut_frame(const std::vector<double> &x, size_t off,
                              int len, const std::vector<double> &window) {
  std::vector<double> f(static_cast<size_t>(len));
  for (int i = 0; i < len; ++i)
    f[static_cast<size_t>(i)] =
        x[off + static_cast<size_t>(i)] * window[static_cast<size_t>(i)];
  return f;
}

double mean_of(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<double> fwssnr_frames(const AudioSignal &clean,
                                  const AudioSignal &test,
                                  const FwssnrConfig &config) {
  const size_t len = common_length(clean, test);
  const Framing fr =
      make_framing(len, clean.sample_rate, config.frame_ms, config.overlap);
  int nfft = 1;
  while (nfft < fr.frame_len) nfft <<= 1;
  const auto bank = mel_filterbank(config.num_bands, nfft, clean.sample_rate);
  const auto window = hamming(fr.frame_len);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> values;
  values.reserve(static_cast<size_t>(fr.num_frames));
  for (int t = 0; t < fr.num_frames; ++t) {
    const size_t off = static_cast<size_t>(t) * fr.hop;
    const auto bc = band_magnitudes(
        cut_frame(clean.samples, off, fr.frame_len, window), fft, nfft, bank);
    const auto bt = band_magnitudes(
        cut_frame(test.samples, off, fr.frame_len, window), fft, nfft, bank);

    double wsum = 0.0, acc = 0.0;
    for (size_t j = 0; j < bc.size(); ++j) {
      if (bc[j] <= 0.0) continue;
      const double w = std::pow(bc[j], config.weight_gamma);
      const double noise = (bc[j] - bt[j]) * (bc[j] - bt[j]);
      const double snr =
          noise <= 0.0 ? config.clamp_hi_db
                       : 10.0 * std::log10(bc[j] * bc[j] / noise);
      acc += w * snr;
      wsum += w;
    }
    if (wsum <= 0.0) continue;  // silent reference frame
    values.push_back(
        std::clamp(acc / wsum, config.clamp_lo_db, config.clamp_hi_db));
  }
  if (values.empty())
    throw InsufficientData("fwssnr: no reference frames with energy");
  return values;
}

std::vector<double> cepstral_frames(const AudioSignal &clean,
                                    const AudioSignal &test,
                                    const CepstralConfig &config) {
  const size_t len = common_length(clean, test);
  const Framing fr =
      make_framing(len, clean.sample_rate, config.frame_ms, config.overlap);
  const auto window = hamming(fr.frame_len);
  const double scale = 10.0 / std::numbers::ln10 * std::numbers::sqrt2;

  std::vector<double> values;
  values.reserve(static_cast<size_t>(fr.num_frames));
  std::vector<double> ac, at;
  for (int t = 0; t < fr.num_frames; ++t) {
    const size_t off = static_cast<size_t>(t) * fr.hop;
    const auto fc = cut_frame(clean.samples, off, fr.frame_len, window);
    const auto ft = cut_frame(test.samples, off, fr.frame_len, window);
    if (!lpc_from_frame(fc, config.lpc_order, ac)) continue;
    if (!lpc_from_frame(ft, config.lpc_order, at)) continue;
    const auto cc = lpc_cepstrum(ac, config.lpc_order, config.num_coeffs);
    const auto ct = lpc_cepstrum(at, config.lpc_order, config.num_coeffs);
    double d2 = 0.0;
    for (int i = 1; i <= config.num_coeffs; ++i) {
      const double d = cc[static_cast<size_t>(i)] - ct[static_cast<size_t>(i)];
      d2 += d * d;
    }
    values.push_back(std::min(scale * std::sqrt(d2), config.frame_cap));
  }
  if (values.empty())
    throw InsufficientData("cepstral_distance: no voiced frames");
  // Keep the smallest trim_fraction of the frames (outlier trimming, as in
  // the reference implementation).
  std::sort(values.begin(), values.end());
  const size_t keep = std::max<size_t>(
      1, static_cast<size_t>(std::floor(config.trim_fraction *
                                        static_cast<double>(values.size()))));
  values.resize(keep);
  return values;
}

}  // namespace

double fwssnr(const AudioSignal &clean, const AudioSignal &test,
              const FwssnrConfig &config) {
  return mean_of(fwssnr_frames(clean, test, config));
}

double cepstral_distance(const AudioSignal &clean, const AudioSignal &test,
                         const CepstralConfig &config) {
  return mean_of(cepstral_frames(clean, test, config));
}

MetricReport compute_metrics(const AudioSignal &clean,
                             const AudioSignal &test) {
  MetricReport r;
  r.fwssnr_frames = fwssnr_frames(clean, test, FwssnrConfig{});
  r.cepstral_frames = cepstral_frames(clean, test, CepstralConfig{});
  r.fwssnr_db = mean_of(r.fwssnr_frames);
  r.cepstral_distance = mean_of(r.cepstral_frames);
  return r;
}

}  // namespace dereverb
