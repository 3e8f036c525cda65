// src/audio.cc

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

#include "dereverb/audio.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace dereverb {

namespace {

uint32_t read_u32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

}  // namespace

std::vector<double> fft_convolve(const std::vector<double> &x,
                                 const std::vector<double> &kernel) {
  if (x.empty() || kernel.empty()) return {};
  const size_t out_len = x.size() + kernel.size() - 1;
  size_t nfft = 1;
  while (nfft < out_len) nfft <<= 1;

  std::vector<double> a(nfft, 0.0), b(nfft, 0.0);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(kernel.begin(), kernel.end(), b.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> full;
  fft.inv(full, fa);
  full.resize(out_len);
  return full;
}

AudioSignal read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  const uint8_t *data = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char *tag = reinterpret_cast<const char *>(bytes.data() + pos);
    const uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_len > bytes.size())
      throw ParseError("truncated chunk in: " + path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw ParseError("short fmt chunk in: " + path);
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (!have_fmt) throw ParseError("missing fmt chunk in: " + path);
  if (data == nullptr) throw ParseError("missing data chunk in: " + path);
  if (channels == 0 || sample_rate == 0)
    throw ParseError("bad fmt fields in: " + path);

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatIeeeFloat && bits == 32;
  if (!pcm16 && !float32)
    throw UnsupportedFormat("only PCM16 and float32 supported: " + path);
  if (channels > 1)
    std::cerr << "warning: " << path << " has " << channels
              << " channels, using channel 0\n";

  const uint32_t bytes_per_sample = bits / 8;
  const uint32_t frame_size = bytes_per_sample * channels;
  const uint32_t frames = frame_size == 0 ? 0 : data_len / frame_size;

  AudioSignal out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.samples.resize(frames);
  for (uint32_t i = 0; i < frames; ++i) {
    const uint8_t *p = data + static_cast<size_t>(i) * frame_size;
    if (pcm16) {
      const int16_t v = static_cast<int16_t>(read_u16(p));
      out.samples[i] = v / 32768.0;
    } else {
      float f;
      std::memcpy(&f, p, 4);
      out.samples[i] = f;
    }
    if (!std::isfinite(out.samples[i]))
      throw ParseError("non-finite sample in: " + path);
  }
  return out;
}

void write_wav(const AudioSignal &signal, const std::string &path) {
  const uint32_t n = static_cast<uint32_t>(signal.samples.size());
  const uint32_t data_len = 2 * n;
  const uint32_t riff_len = 36 + data_len;
  const uint32_t rate = static_cast<uint32_t>(signal.sample_rate);
  const uint32_t byte_rate = rate * 2;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  auto put_u32 = [&out](uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16),
                          static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char *>(b), 4);
  };
  auto put_u16 = [&out](uint16_t v) {
    const uint8_t b[2] = {static_cast<uint8_t>(v),
                          static_cast<uint8_t>(v >> 8)};
    out.write(reinterpret_cast<const char *>(b), 2);
  };

  out.write("RIFF", 4);
  put_u32(riff_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(byte_rate);
  put_u16(2);   // block align
  put_u16(16);  // bits
  out.write("data", 4);
  put_u32(data_len);
  for (double s : signal.samples) {
    if (!std::isfinite(s)) throw InvalidParameter("write_wav: non-finite sample");
    const double clipped = std::clamp(s, -1.0, 1.0);
    const long q = std::lround(clipped * 32768.0);
    const int16_t v = static_cast<int16_t>(std::clamp(q, -32768L, 32767L));
    put_u16(static_cast<uint16_t>(v));
  }
  if (!out) throw IoError("write failed: " + path);
}

AudioSignal highpass_filter(const AudioSignal &signal, int taps,
                            double cutoff_hz) {
  if (cutoff_hz <= 0.0 || cutoff_hz >= signal.sample_rate / 2.0)
    throw InvalidParameter("highpass_filter: cutoff out of (0, fs/2)");
  if (taps < 3) throw InvalidParameter("highpass_filter: taps < 3");
  if (taps % 2 == 0) ++taps;
  if (signal.samples.empty()) return signal;

  // Low pass by windowed sinc, normalized to unit DC gain, then inverted.
  const int center = (taps - 1) / 2;
  const double fc = cutoff_hz / signal.sample_rate;
  std::vector<double> kernel(taps);
  double lp_sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const int d = i - center;
    const double sinc =
        d == 0 ? 2.0 * fc
               : std::sin(2.0 * std::numbers::pi * fc * d) /
                     (std::numbers::pi * d);
    const double hamming =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
    kernel[i] = sinc * hamming;
    lp_sum += kernel[i];
  }
  for (int i = 0; i < taps; ++i) kernel[i] = -kernel[i] / lp_sum;
  kernel[center] += 1.0;

  // Replicate edges so steady-state inputs see no boundary step.
  const size_t n = signal.samples.size();
  std::vector<double> padded(n + 2 * static_cast<size_t>(center));
  std::fill(padded.begin(), padded.begin() + center, signal.samples.front());
  std::copy(signal.samples.begin(), signal.samples.end(),
            padded.begin() + center);
  std::fill(padded.end() - center, padded.end(), signal.samples.back());

  const std::vector<double> full = fft_convolve(padded, kernel);

  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  // full[i] corresponds to padded position i - center; the signal starts at
  // padded position center, so the aligned output begins at 2 * center.
  out.samples.assign(full.begin() + 2 * center, full.begin() + 2 * center + n);
  return out;
}

}  // namespace dereverb
