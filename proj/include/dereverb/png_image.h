// include/dereverb/png_image.h

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

#ifndef DEREVERB_PNG_IMAGE_H_
#define DEREVERB_PNG_IMAGE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dereverb/divergence.h"

namespace dereverb {

// Raw 8-bit RGB writer, row-major, top row first.
void write_png_rgb(const std::string &path, int width, int height,
                   const std::vector<uint8_t> &rgb);

// Matrix rendered with a dark-to-bright colormap.  log_scale maps values
// through log10(v + tiny) first (spectrogram view); flip_rows puts row 0 at
// the bottom (low frequencies down).
void write_matrix_heatmap(const std::string &path, const Matrix &values,
                          bool log_scale, bool flip_rows);

// Minimal grouped bar chart: one group per label, series side by side.
void write_bar_chart(const std::string &path,
                     const std::vector<std::string> &labels,
                     const std::vector<std::vector<double>> &series);

}  // namespace dereverb

#endif  // DEREVERB_PNG_IMAGE_H_
