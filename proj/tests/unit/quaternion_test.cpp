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

#include "oracles.hpp"
#include "qrnn/errors.hpp"
#include "qrnn/quaternion.hpp"
#include "qrnn/rng.hpp"

using namespace qrnn;

TEST_CASE("hamilton product: identity and unit basis") {
  const Quaternion one{1, 0, 0, 0}, i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  const Quaternion q{0.3, -1.5, 2.25, 7.0};
  CHECK(hamilton_product(one, q) == q);
  CHECK(hamilton_product(q, one) == q);
  CHECK(hamilton_product(i, j) == k);
  CHECK(hamilton_product(j, i) == -k);
  CHECK(hamilton_product(j, k) == i);
  CHECK(hamilton_product(k, i) == j);
  CHECK(hamilton_product(i, i) == -one);
  // ijk = -1
  CHECK(hamilton_product(hamilton_product(i, j), k) == -one);
}

TEST_CASE("hamilton product: worked example") {
  const Quaternion a{1, 2, 3, 4}, b{5, 6, 7, 8};
  // Term-by-term expansion, and the matrix route, both give (-60, 12, 30, 24).
  CHECK(hamilton_product(a, b) == Quaternion{-60, 12, 30, 24});
  CHECK(oracle::matrix_product(a, b) == Quaternion{-60, 12, 30, 24});
}

TEST_CASE("conjugate and norm") {
  CHECK(conjugate({1, 2, 3, 4}) == Quaternion{1, -2, -3, -4});
  CHECK(norm({1, 1, 1, 1}) == 2.0);
  CHECK(norm({0, 0, 0, 0}) == 0.0);

  Rng rng(11);
  for (int n = 0; n < 1000; ++n) {
    const Quaternion q = oracle::random_quaternion(rng, 3.0);
    CHECK(conjugate(conjugate(q)) == q);
    const Quaternion p = hamilton_product(q, conjugate(q));
    const double n2 = norm(q) * norm(q);
    CHECK(p.r == doctest::Approx(n2).epsilon(1e-14));
    CHECK(std::abs(p.x) <= 1e-14 * n2);
    CHECK(std::abs(p.y) <= 1e-14 * n2);
    CHECK(std::abs(p.z) <= 1e-14 * n2);
  }
}

TEST_CASE("left_mul_matrix") {
  const Mat4 id = left_mul_matrix({1, 0, 0, 0});
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(id[r][c] == (r == c ? 1.0 : 0.0));

  const Mat4 m = left_mul_matrix({2, 3, 5, 7});
  const Mat4 want = {{{2, -3, -5, -7}, {3, 2, -7, 5}, {5, 7, 2, -3}, {7, -5, 3, 2}}};
  CHECK(m == want);

  Rng rng(5);
  for (int n = 0; n < 100; ++n) {
    const Quaternion q = oracle::random_quaternion(rng), v = oracle::random_quaternion(rng);
    const Quaternion a = hamilton_product(q, v), b = oracle::matrix_product(q, v);
    CHECK(std::abs(a.r - b.r) <= 1e-15);
    CHECK(std::abs(a.x - b.x) <= 1e-15);
    CHECK(std::abs(a.y - b.y) <= 1e-15);
    CHECK(std::abs(a.z - b.z) <= 1e-15);
  }
}

TEST_CASE("kHamiltonBlocks reproduces left_mul_matrix") {
  const Quaternion q{0.5, -1.25, 2.0, 3.5};
  const double comp[4] = {q.r, q.x, q.y, q.z};
  const Mat4 m = left_mul_matrix(q);
  for (int co = 0; co < 4; ++co)
    for (int ci = 0; ci < 4; ++ci) {
      const auto& e = kHamiltonBlocks[co][ci];
      CHECK(e.sign * comp[e.component] == m[co][ci]);
    }
}

TEST_CASE("split layout packing") {
  const std::vector<Quaternion> qs = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  const QuaternionVector v = pack_split(qs);
  CHECK(v.raw() == std::vector<double>{1, 5, 2, 6, 3, 7, 4, 8});
  CHECK(v.n_quats() == 2);
  CHECK(unpack_split(v) == qs);

  const std::vector<Quaternion> zeros(5);
  CHECK(pack_split(zeros).raw() == std::vector<double>(20, 0.0));

  const std::vector<double> bad(7, 1.0);
  CHECK_THROWS_AS(unpack_split(std::span<const double>(bad)), ShapeError);
  CHECK_THROWS_AS(QuaternionVector::from_components(bad), ShapeError);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Quaternion> list(1 + rng.below(20));
    for (auto& q : list) q = oracle::random_quaternion(rng, 10.0);
    CHECK(unpack_split(pack_split(list)) == list);
  }
}

TEST_CASE("algebra properties on random operands") {
  Rng rng(2024);
  for (int n = 0; n < 2000; ++n) {
    const Quaternion a = oracle::random_quaternion(rng, 5.0);
    const Quaternion b = oracle::random_quaternion(rng, 5.0);
    const Quaternion c = oracle::random_quaternion(rng, 5.0);
    const double prod = norm(a) * norm(b);
    CHECK(std::abs(norm(hamilton_product(a, b)) - prod) <= 1e-12 * prod);

    const Quaternion l = hamilton_product(hamilton_product(a, b), c);
    const Quaternion r = hamilton_product(a, hamilton_product(b, c));
    const double scale = norm(a) * norm(b) * norm(c);
    CHECK(norm(Quaternion{l.r - r.r, l.x - r.x, l.y - r.y, l.z - r.z}) <= 1e-12 * scale);

    const Mat4 lhs = left_mul_matrix(hamilton_product(a, b));
    const Mat4 rhs = oracle::matmul4(left_mul_matrix(a), left_mul_matrix(b));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(std::abs(lhs[i][j] - rhs[i][j]) <= 1e-12 * prod);
  }
}
