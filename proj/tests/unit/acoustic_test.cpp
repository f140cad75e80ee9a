/*
 * Copyright 2026 The qrnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "qrnn/acoustic.hpp"
#include "qrnn/errors.hpp"

using namespace qrnn;

namespace {

Tensor random_energies(Rng& rng, std::size_t frames, std::size_t bands) {
  Tensor e({frames, bands});
  for (double& v : e.raw()) v = rng.uniform(-10.0, 10.0);
  return e;
}

std::vector<std::vector<double>> rows_of(const Tensor& t) {
  std::vector<std::vector<double>> out(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) out[r].push_back(t.at(r, c));
  return out;
}

}  // namespace

TEST_CASE("constant energies have zero derivatives") {
  const Tensor e({20, 3}, 4.25);
  const Tensor packed = acoustic::pack_features_matrix(e);
  for (std::size_t t = 0; t < 20; ++t) {
    for (std::size_t f = 0; f < 3; ++f) {
      CHECK(packed.at(t, f) == 4.25);
      for (std::size_t k = 1; k < 4; ++k) CHECK(packed.at(t, k * 3 + f) == 0.0);
    }
  }
}

TEST_CASE("ramp deltas") {
  Tensor e({10, 1});
  for (std::size_t t = 0; t < 10; ++t) e.raw()[t] = static_cast<double>(t);
  const Tensor d = acoustic::compute_delta(e);
  CHECK(d.raw()[0] == doctest::Approx(0.5));
  CHECK(d.raw()[1] == doctest::Approx(0.8));
  for (std::size_t t = 2; t < 8; ++t) CHECK(d.raw()[t] == doctest::Approx(1.0));
  CHECK(d.raw()[9] == doctest::Approx(0.5));
  CHECK(d.raw()[8] == doctest::Approx(0.8));
}

TEST_CASE("output shape") {
  Rng rng(1);
  const Tensor packed = acoustic::pack_features_matrix(random_energies(rng, 7, 40));
  CHECK(packed.shape() == std::vector<std::size_t>{7, 160});
  const auto qs = acoustic::pack_features(random_energies(rng, 7, 40));
  REQUIRE(qs.size() == 7);
  CHECK(qs[0].n_quats() == 40);
}

TEST_CASE("delta matches the edge-padded oracle") {
  Rng rng(2);
  for (std::size_t window : {1u, 2u, 3u}) {
    const Tensor e = random_energies(rng, 50, 8);
    const Tensor d = acoustic::compute_delta(e, window);
    const auto want = oracle::delta(rows_of(e), window);
    for (std::size_t t = 0; t < 50; ++t)
      for (std::size_t f = 0; f < 8; ++f)
        CHECK(std::abs(d.at(t, f) - want[t][f]) <= 1e-12);
  }
  // Short sequences: the window reaches past both edges.
  const Tensor shortseq = random_energies(rng, 2, 3);
  const auto want = oracle::delta(rows_of(shortseq), 2);
  const Tensor got = acoustic::compute_delta(shortseq);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t f = 0; f < 3; ++f) CHECK(std::abs(got.at(t, f) - want[t][f]) <= 1e-12);
}

TEST_CASE("higher orders are iterated deltas and real parts are untouched") {
  Rng rng(3);
  const Tensor e = random_energies(rng, 30, 5);
  const Tensor d1 = acoustic::compute_delta(e);
  const Tensor d2 = acoustic::compute_delta(d1);
  const Tensor d3 = acoustic::compute_delta(d2);
  const Tensor packed = acoustic::pack_features_matrix(e);
  const auto qs = acoustic::pack_features(e);
  for (std::size_t t = 0; t < 30; ++t) {
    for (std::size_t f = 0; f < 5; ++f) {
      CHECK(packed.at(t, f) == e.at(t, f));
      CHECK(packed.at(t, 5 + f) == d1.at(t, f));
      CHECK(packed.at(t, 10 + f) == d2.at(t, f));
      CHECK(packed.at(t, 15 + f) == d3.at(t, f));
      CHECK(qs[t].get(f) == Quaternion{e.at(t, f), d1.at(t, f), d2.at(t, f), d3.at(t, f)});
    }
  }
}

TEST_CASE("parallel delta equals the serial reference bitwise") {
  Rng rng(4);
  const Tensor e = random_energies(rng, 3000, 40);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const Tensor par = acoustic::compute_delta(e, 3);
  omp_set_num_threads(saved);
  CHECK(par == acoustic::serial::compute_delta(e, 3));
}

TEST_CASE("linearity and shift covariance") {
  Rng rng(5);
  const Tensor a = random_energies(rng, 25, 4), b = random_energies(rng, 25, 4);
  Tensor combo({25, 4});
  for (std::size_t k = 0; k < combo.size(); ++k) combo.raw()[k] = 2.0 * a.raw()[k] - 0.5 * b.raw()[k];
  const Tensor da = acoustic::compute_delta(a), db = acoustic::compute_delta(b);
  const Tensor dc = acoustic::compute_delta(combo);
  for (std::size_t k = 0; k < combo.size(); ++k)
    CHECK(std::abs(dc.raw()[k] - (2.0 * da.raw()[k] - 0.5 * db.raw()[k])) <= 1e-12);

  // Delaying the input by s frames delays the interior output by s frames.
  const std::size_t s = 3;
  Tensor shifted({25 + s, 4});
  for (std::size_t t = 0; t < 25 + s; ++t)
    for (std::size_t f = 0; f < 4; ++f) shifted.raw()[t * 4 + f] = a.at(t < s ? 0 : t - s, f);
  const Tensor ds = acoustic::compute_delta(shifted);
  for (std::size_t t = 0; t < 25; ++t)
    for (std::size_t f = 0; f < 4; ++f) CHECK(ds.at(t + s, f) == da.at(t, f));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(acoustic::compute_delta(Tensor({0, 3})), ShapeError);
  CHECK_THROWS_AS(acoustic::compute_delta(Tensor({4})), ShapeError);
  CHECK_THROWS_AS(acoustic::compute_delta(Tensor({4, 2}), 0), InputError);
  Tensor bad({3, 2}, 1.0);
  bad.raw()[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(acoustic::pack_features_matrix(bad), InputError);
}
