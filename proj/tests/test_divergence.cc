// tests/test_divergence.cc

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dereverb/divergence.h"

using dereverb::Beta;
using dereverb::Matrix;
using dereverb::beta_divergence;
using dereverb::beta_divergence_split;

namespace {

Matrix scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

Matrix random_positive(Eigen::Index rows, Eigen::Index cols, uint64_t seed,
                       double lo = 0.1, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("beta divergence vanishes at Y == X", "[divergence]") {
  const Matrix y = random_positive(6, 7, 11);
  for (double b : {0.0, 0.5, 0.75, 1.0, 1.45, 2.0, 2.5, 3.0}) {
    CAPTURE(b);
    CHECK(beta_divergence(y, y, Beta(b)) == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("beta = 2 is half the squared Frobenius distance", "[divergence]") {
  CHECK(beta_divergence(scalar(2.0), scalar(1.0), Beta(2.0)) ==
        Catch::Approx(0.5).epsilon(1e-12));
  const Matrix y = random_positive(5, 4, 21);
  const Matrix x = random_positive(5, 4, 22);
  CHECK(beta_divergence(y, x, Beta(2.0)) ==
        Catch::Approx(0.5 * (y - x).square().sum()).epsilon(1e-12));
}

TEST_CASE("KL and IS limit forms match the generic formula", "[divergence]") {
  // KL at Y = e, X = 1: e*log(e) - e + 1 = 1.
  CHECK(beta_divergence(scalar(std::exp(1.0)), scalar(1.0), Beta(1.0)) ==
        Catch::Approx(1.0).epsilon(1e-12));

  const Matrix y = random_positive(4, 6, 31);
  const Matrix x = random_positive(4, 6, 32);
  const double kl = beta_divergence(y, x, Beta(1.0));
  for (double b : {1.0 - 1e-6, 1.0 + 1e-6}) {
    CHECK(beta_divergence(y, x, Beta(b)) == Catch::Approx(kl).epsilon(1e-4));
  }
  const double is = beta_divergence(y, x, Beta(0.0));
  CHECK(beta_divergence(y, x, Beta(1e-6)) == Catch::Approx(is).epsilon(1e-4));
}

TEST_CASE("divergence is nonnegative and detects singular entries",
          "[divergence]") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix y = random_positive(3, 3, 100 + seed);
    const Matrix x = random_positive(3, 3, 200 + seed);
    for (double b : {0.0, 0.5, 1.0, 1.45, 2.0, 2.7})
      CHECK(beta_divergence(y, x, Beta(b)) >= -1e-12);
  }
  Matrix x = random_positive(2, 2, 5);
  x(0, 0) = 0.0;
  const Matrix y = random_positive(2, 2, 6);
  for (double b : {0.0, 0.5, 1.0, 1.9})
    CHECK_THROWS_AS(beta_divergence(y, x, Beta(b)),
                    dereverb::DivergenceSingularity);
  CHECK_NOTHROW(beta_divergence(y, x, Beta(2.0)));
  CHECK_NOTHROW(beta_divergence(y, x, Beta(2.5)));
}

TEST_CASE("split parts sum to the divergence", "[divergence]") {
  for (double b : {0.0, 0.5, 0.75, 1.0, 1.45, 2.0, 2.5}) {
    CAPTURE(b);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const Matrix y = random_positive(5, 5, 300 + seed);
      const Matrix x = random_positive(5, 5, 400 + seed);
      const auto [convex, concave] = beta_divergence_split(y, x, Beta(b));
      const double d = beta_divergence(y, x, Beta(b));
      CHECK(convex + concave ==
            Catch::Approx(d).epsilon(1e-10).margin(1e-10));
    }
  }
}

TEST_CASE("split matches the hand expansion at beta = 2", "[divergence]") {
  // Y = 1, X = 2: convex part X^2/2 - Y X + Y^2/2 = 2 - 2 + 0.5, concave 0.
  const auto [convex, concave] =
      beta_divergence_split(scalar(1.0), scalar(2.0), Beta(2.0));
  CHECK(convex == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(concave == Catch::Approx(0.0).margin(1e-15));
  CHECK(beta_divergence(scalar(1.0), scalar(2.0), Beta(2.0)) ==
        Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("split convexity and concavity hold on random segments",
          "[divergence]") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> tdist(0.05, 0.95);
  for (double b : {0.0, 0.5, 0.75, 1.0, 1.45, 2.0, 2.5}) {
    CAPTURE(b);
    for (int trial = 0; trial < 25; ++trial) {
      const Matrix y = random_positive(4, 4, 500 + trial);
      const Matrix x1 = random_positive(4, 4, 600 + trial);
      const Matrix x2 = random_positive(4, 4, 700 + trial);
      const double t = tdist(rng);
      const Matrix xm = t * x1 + (1.0 - t) * x2;
      const auto [cv_m, cc_m] = beta_divergence_split(y, xm, Beta(b));
      const auto [cv_1, cc_1] = beta_divergence_split(y, x1, Beta(b));
      const auto [cv_2, cc_2] = beta_divergence_split(y, x2, Beta(b));
      CHECK(cv_m <= t * cv_1 + (1.0 - t) * cv_2 + 1e-10);
      CHECK(cc_m >= t * cc_1 + (1.0 - t) * cc_2 - 1e-10);
    }
  }
}

TEST_CASE("analytic gradient matches central differences", "[divergence]") {
  const double h = 1e-5;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.4, 2.0);
  for (double b : {0.0, 0.5, 0.75, 1.0, 1.45, 2.0, 2.5}) {
    CAPTURE(b);
    for (int trial = 0; trial < 10; ++trial) {
      const double y = dist(rng), x = dist(rng);
      const double fd = (beta_divergence(scalar(y), scalar(x + h), Beta(b)) -
                         beta_divergence(scalar(y), scalar(x - h), Beta(b))) /
                        (2.0 * h);
      CHECK(dereverb::divergence_gradient(y, x, Beta(b)) ==
            Catch::Approx(fd).epsilon(1e-5).margin(1e-8));
    }
  }
}

TEST_CASE("second derivative formula and finite differences agree",
          "[divergence]") {
  CHECK(dereverb::second_derivative(3.7, 1.3, Beta(2.0)) ==
        Catch::Approx(1.0).epsilon(1e-12));
  CHECK(dereverb::second_derivative(4.0, 2.0, Beta(1.0)) ==
        Catch::Approx(1.0).epsilon(1e-12));

  const double h = 1e-4;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  for (double b : {0.5, 0.75, 1.45, 2.0, 2.5}) {
    CAPTURE(b);
    for (int trial = 0; trial < 10; ++trial) {
      const double y = dist(rng), x = dist(rng);
      const double f0 = beta_divergence(scalar(y), scalar(x), Beta(b));
      const double fp = beta_divergence(scalar(y), scalar(x + h), Beta(b));
      const double fm = beta_divergence(scalar(y), scalar(x - h), Beta(b));
      const double fd = (fp - 2.0 * f0 + fm) / (h * h);
      CHECK(dereverb::second_derivative(y, x, Beta(b)) ==
            Catch::Approx(fd).epsilon(1e-5).margin(1e-6));
    }
  }
  CHECK_THROWS_AS(dereverb::second_derivative(1.0, 0.0, Beta(1.0)),
                  dereverb::DivergenceSingularity);
}

TEST_CASE("update exponents never collide", "[divergence]") {
  for (double b = 0.0; b <= 3.0; b += 0.01) {
    const Beta beta(b);
    CHECK(beta.alpha1() - beta.alpha2() >= 1.0 - 1e-12);
  }
}
