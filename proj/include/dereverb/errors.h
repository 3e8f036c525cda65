// include/dereverb/errors.h

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

#ifndef DEREVERB_ERRORS_H_
#define DEREVERB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dereverb {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed input file (bad RIFF header, truncated chunk, ...).
class ParseError : public Error {
 public:
  using Error::Error;
};

// File parsed but uses an encoding we do not handle.
class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

// Underlying read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// A parameter violates its documented range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// An operation that requires samples received none.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Divergence evaluated where it is undefined (zero model entry against
// positive data with beta < 2).
class DivergenceSingularity : public Error {
 public:
  using Error::Error;
};

// Normalization hit an all-zero dictionary column or kernel row.
class DegenerateFactor : public Error {
 public:
  using Error::Error;
};

// Input carries no usable energy (e.g. all-zero spectrogram).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Signal shorter than one analysis frame.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace dereverb

#endif  // DEREVERB_ERRORS_H_
