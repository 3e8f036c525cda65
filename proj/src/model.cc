// src/model.cc

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

#include "dereverb/model.h"

#include <cassert>
#include <fstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace dereverb {

namespace {

void check_dims(const Dictionary &W, const Activations &U,
                const ReverbKernel &H) {
  if (W.atoms() != U.atoms())
    throw ShapeError("synthesize: W atom count != U atom count");
  if (W.bands() != H.bands())
    throw ShapeError("synthesize: W band count != H band count");
}

}  // namespace

ReverbKernel delta_kernel(Eigen::Index bands, Eigen::Index taps) {
  ReverbKernel h;
  h.h = Matrix::Zero(bands, taps);
  h.h.col(0).setOnes();
  return h;
}

Matrix synthesize(const Dictionary &W, const Activations &U,
                  const ReverbKernel &H) {
  check_dims(W, U, H);
  const Eigen::Index K = W.bands();
  const Eigen::Index N = U.frames();
  const Eigen::Index M = H.taps();

  const Matrix v = (W.w.matrix() * U.u.matrix()).array();  // K x N
  Matrix x = Matrix::Zero(K, N);
  for (Eigen::Index m = 0; m < M && m < N; ++m) {
    if ((H.h.col(m) == 0.0).all()) continue;
    x.rightCols(N - m) += v.leftCols(N - m).colwise() * H.h.col(m);
  }
  return x;
}

ModelState::ModelState(Dictionary w, Activations u, ReverbKernel h)
    : dictionary(std::move(w)), activations(std::move(u)),
      kernel(std::move(h)) {
  resync();
}

void ModelState::resync() {
  x = synthesize(dictionary, activations, kernel);
}

void ModelState::assert_consistent() const {
#ifndef NDEBUG
  const Matrix fresh = synthesize(dictionary, activations, kernel);
  const double scale = fresh.abs().maxCoeff();
  assert((x - fresh).abs().maxCoeff() <= 1e-9 * (1.0 + scale));
#endif
}

void normalize(ModelState &state) {
  Matrix &w = state.dictionary.w;
  Matrix &u = state.activations.u;
  Matrix &h = state.kernel.h;

  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double s = w.col(j).sum();
    if (s <= 0.0) throw DegenerateFactor("normalize: all-zero W column");
    w.col(j) /= s;
    u.row(j) *= s;  // exact compensation, synthesis unchanged
  }
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double m = h.row(k).maxCoeff();
    if (m <= 0.0) throw DegenerateFactor("normalize: all-zero H row");
    h.row(k) /= m;
  }
  state.resync();
}

std::string factors_to_json(const ModelState &state) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["K"] = state.dictionary.bands();
  j["N"] = state.activations.frames();
  j["J"] = state.dictionary.atoms();
  j["M"] = state.kernel.taps();

  auto row_major = [](const Matrix &m) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
  };
  j["W"] = row_major(state.dictionary.w);
  j["U"] = row_major(state.activations.u);
  j["H"] = row_major(state.kernel.h);
  return j.dump();
}

ModelState factors_from_json(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("factors: ") + e.what());
  }
  const Eigen::Index K = j.at("K").get<Eigen::Index>();
  const Eigen::Index N = j.at("N").get<Eigen::Index>();
  const Eigen::Index J = j.at("J").get<Eigen::Index>();
  const Eigen::Index M = j.at("M").get<Eigen::Index>();

  auto from_row_major = [](const std::vector<double> &v, Eigen::Index rows,
                           Eigen::Index cols) {
    if (static_cast<Eigen::Index>(v.size()) != rows * cols)
      throw ParseError("factors: matrix size mismatch");
    Matrix m(rows, cols);
    size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[i++];
    return m;
  };
  Dictionary w{from_row_major(j.at("W").get<std::vector<double>>(), K, J)};
  Activations u{from_row_major(j.at("U").get<std::vector<double>>(), J, N)};
  ReverbKernel h{from_row_major(j.at("H").get<std::vector<double>>(), K, M)};
  return ModelState(std::move(w), std::move(u), std::move(h));
}

void dump_factors(const ModelState &state, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << factors_to_json(state);
  if (!out) throw IoError("write failed: " + path);
}

ModelState load_factors(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return factors_from_json(text);
}

}  // namespace dereverb
