/*
Copyright (c) 2026 The ripple-gnn Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include "ripple/linalg.hpp"
#include "ripple/random.hpp"

using namespace ripple;

TEST(Linalg, MatvecIdentity) {
  EXPECT_EQ(matvec(matrix::identity(2), vec{3, 4}), (vec{3, 4}));
}

TEST(Linalg, MatvecHandProduct) {
  matrix w(2, 2, {1, 2, 0, 1});
  EXPECT_EQ(matvec(w, vec{1, 1}), (vec{3, 1}));
}

TEST(Linalg, MatvecZero) {
  EXPECT_EQ(matvec(matrix(3, 2), vec{5, -7}), (vec{0, 0, 0}));
}

TEST(Linalg, MatvecDimMismatch) {
  EXPECT_THROW(matvec(matrix(2, 3), vec{1, 2}), dim_mismatch_error);
  vec out(3);
  EXPECT_THROW(matvec(matrix(2, 2), vec{1, 2}, out), dim_mismatch_error);
}

TEST(Linalg, MatrixStorageMismatch) { EXPECT_THROW(matrix(2, 2, {1, 2, 3}), dim_mismatch_error); }

TEST(Linalg, Axpy) {
  EXPECT_EQ(axpy(1.0, vec{3, 4}, vec{1, 1}), (vec{4, 5}));
  const vec x{0.3, -1.7, 2.2};
  EXPECT_EQ(axpy(-1.0, x, x), (vec{0, 0, 0}));
  EXPECT_EQ(axpy(0.5, vec{2, 2}, vec{0, 0}), (vec{1, 1}));
  EXPECT_THROW(axpy(1.0, vec{1}, vec{1, 2}), dim_mismatch_error);
}

TEST(Linalg, Relu) {
  EXPECT_EQ(relu(vec{-1, 0, 2}), (vec{0, 0, 2}));
  EXPECT_EQ(relu(vec{-1, -0.5, -3}), (vec{0, 0, 0}));
  const vec x{-2, 3, 0.5, -0.1};
  EXPECT_EQ(relu(relu(x)), relu(x));
}

TEST(Linalg, Argmax) {
  EXPECT_EQ(argmax(vec{0.1, 0.9, 0.3}), 1u);
  EXPECT_EQ(argmax(vec{1, 1}), 0u);
  EXPECT_EQ(argmax(vec{42}), 0u);
  EXPECT_THROW(argmax(vec{}), dim_mismatch_error);
}

TEST(Linalg, MatvecLinearity) {
  rng gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + gen.below(12), c = 1 + gen.below(12);
    matrix w(r, c);
    for (auto& v : w.flat())
      v = gen.uniform(-1, 1);
    vec x(c), y(c);
    for (auto& v : x)
      v = gen.uniform(-1, 1);
    for (auto& v : y)
      v = gen.uniform(-1, 1);
    const double a = gen.uniform(-3, 3), b = gen.uniform(-3, 3);
    vec combo(c);
    for (std::size_t i = 0; i < c; ++i)
      combo[i] = a * x[i] + b * y[i];
    const vec lhs = matvec(w, combo);
    const vec wx = matvec(w, x), wy = matvec(w, y);
    for (std::size_t i = 0; i < r; ++i) {
      const double rhs = a * wx[i] + b * wy[i];
      EXPECT_NEAR(lhs[i], rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST(Linalg, MaxAbsDiffFlagsNaN) {
  EXPECT_EQ(max_abs_diff(vec{1, 2}, vec{1, 2.5}), 0.5);
  EXPECT_TRUE(std::isinf(max_abs_diff(vec{1, std::nan("")}, vec{1, 2})));
}
