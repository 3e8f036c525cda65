// src/png_image.cc

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

#include "dereverb/png_image.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <png.h>

#include "dereverb/errors.h"

namespace dereverb {

namespace {

struct Rgb {
  uint8_t r, g, b;
};

// Compact magma-like ramp, linearly interpolated.
Rgb colormap(double v) {
  static const double anchors[6][3] = {
      {0.00, 0.00, 0.02}, {0.18, 0.05, 0.35}, {0.45, 0.10, 0.43},
      {0.73, 0.21, 0.33}, {0.95, 0.51, 0.18}, {0.99, 0.91, 0.61}};
  v = std::clamp(v, 0.0, 1.0) * 5.0;
  const int i = std::min(4, static_cast<int>(v));
  const double f = v - i;
  Rgb c;
  c.r = static_cast<uint8_t>(
      255.0 * (anchors[i][0] + f * (anchors[i + 1][0] - anchors[i][0])));
  c.g = static_cast<uint8_t>(
      255.0 * (anchors[i][1] + f * (anchors[i + 1][1] - anchors[i][1])));
  c.b = static_cast<uint8_t>(
      255.0 * (anchors[i][2] + f * (anchors[i + 1][2] - anchors[i][2])));
  return c;
}

void put_pixel(std::vector<uint8_t> &rgb, int width, int x, int y, Rgb c) {
  const size_t i = 3 * (static_cast<size_t>(y) * width + x);
  rgb[i] = c.r;
  rgb[i + 1] = c.g;
  rgb[i + 2] = c.b;
}

}  // namespace

void write_png_rgb(const std::string &path, int width, int height,
                   const std::vector<uint8_t> &rgb) {
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<size_t>(width) * height * 3)
    throw InvalidParameter("write_png_rgb: bad image dimensions");

  FILE *fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open for writing: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw IoError("libpng failure writing: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(
                           rgb.data() + 3 * static_cast<size_t>(y) * width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_matrix_heatmap(const std::string &path, const Matrix &values,
                          bool log_scale, bool flip_rows) {
  const int rows = static_cast<int>(values.rows());
  const int cols = static_cast<int>(values.cols());
  if (rows == 0 || cols == 0)
    throw InvalidParameter("write_matrix_heatmap: empty matrix");

  Matrix v = values;
  if (log_scale) v = (v + 1e-12).log10();
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  // Upscale small matrices so grid experiments stay legible.
  const int cell = std::max(1, 256 / std::max(rows, cols));
  const int width = cols * cell;
  const int height = rows * cell;
  std::vector<uint8_t> rgb(static_cast<size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    const int r0 = y / cell;
    const int r = flip_rows ? rows - 1 - r0 : r0;
    for (int x = 0; x < width; ++x) {
      const Rgb c = colormap((v(r, x / cell) - lo) / span);
      put_pixel(rgb, width, x, y, c);
    }
  }
  write_png_rgb(path, width, height, rgb);
}

void write_bar_chart(const std::string &path,
                     const std::vector<std::string> &labels,
                     const std::vector<std::vector<double>> &series) {
  if (labels.empty() || series.empty())
    throw InvalidParameter("write_bar_chart: nothing to plot");
  for (const auto &s : series)
    if (s.size() != labels.size())
      throw InvalidParameter("write_bar_chart: ragged series");

  double hi = 0.0, lo = 0.0;
  for (const auto &s : series)
    for (double x : s) {
      hi = std::max(hi, x);
      lo = std::min(lo, x);
    }
  if (hi == lo) hi = lo + 1.0;

  const int groups = static_cast<int>(labels.size());
  const int per_group = static_cast<int>(series.size());
  const int bar_w = 24, gap = 16, margin = 20;
  const int width = margin * 2 + groups * (per_group * bar_w + gap);
  const int height = 240;
  const int base = height - margin;
  const int top = margin;

  std::vector<uint8_t> rgb(static_cast<size_t>(width) * height * 3, 245);
  auto y_of = [&](double v) {
    const double f = (v - lo) / (hi - lo);
    return static_cast<int>(base - f * (base - top));
  };
  const int zero_y = y_of(std::max(0.0, lo));
  for (int g = 0; g < groups; ++g) {
    for (int s = 0; s < per_group; ++s) {
      const double v = series[static_cast<size_t>(s)][static_cast<size_t>(g)];
      const int x0 = margin + g * (per_group * bar_w + gap) + s * bar_w;
      const Rgb c = colormap(0.15 + 0.7 * s / std::max(1, per_group - 1));
      const int y1 = y_of(v);
      const int ytop = std::min(y1, zero_y), ybot = std::max(y1, zero_y);
      for (int y = ytop; y <= ybot; ++y)
        for (int x = x0; x < x0 + bar_w - 2; ++x) put_pixel(rgb, width, x, y, c);
    }
  }
  // baseline
  for (int x = margin / 2; x < width - margin / 2; ++x)
    put_pixel(rgb, width, x, zero_y, Rgb{40, 40, 40});
  write_png_rgb(path, width, height, rgb);
}

}  // namespace dereverb
