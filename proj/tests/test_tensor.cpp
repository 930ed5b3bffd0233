// Copyright 2026 The SpikeKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spikekit/tensor.hpp"

#include <gtest/gtest.h>

#include "spikekit/rng.hpp"

using namespace spikekit;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Independent oracle: textbook triple loop.
Tensor matmul_oracle(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * b.at(p, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

// Independent oracle: direct six-loop summation over the padded input.
Tensor conv2d_oracle(const Tensor& input, const Tensor& kernel,
                     std::size_t stride, std::size_t padding) {
  const std::size_t c = input.shape()[0];
  const std::size_t h = input.shape()[1];
  const std::size_t w = input.shape()[2];
  const std::size_t f = kernel.shape()[0];
  const std::size_t kh = kernel.shape()[2];
  const std::size_t kw = kernel.shape()[3];
  const std::size_t oh = (h + 2 * padding - kh) / stride + 1;
  const std::size_t ow = (w + 2 * padding - kw) / stride + 1;
  Tensor out({f, oh, ow});
  for (std::size_t fi = 0; fi < f; ++fi) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double acc = 0.0;
        for (std::size_t ci = 0; ci < c; ++ci) {
          for (std::size_t ky = 0; ky < kh; ++ky) {
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const long iy = static_cast<long>(oy * stride + ky) -
                              static_cast<long>(padding);
              const long ix = static_cast<long>(ox * stride + kx) -
                              static_cast<long>(padding);
              if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) ||
                  ix >= static_cast<long>(w)) {
                continue;
              }
              acc += input.at(ci, iy, ix) * kernel.at(fi, ci, ky, kx);
            }
          }
        }
        out.at(fi, oy, ox) = acc;
      }
    }
  }
  return out;
}

void expect_close(const Tensor& a, const Tensor& b, double rel = 1e-12) {
  ASSERT_EQ(a.shape(), b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tol = rel * std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    EXPECT_NEAR(a[i], b[i], tol) << "at flat index " << i;
  }
}

}  // namespace

TEST(TensorTest, ConstructionChecksShape) {
  EXPECT_NO_THROW(Tensor({2, 3}, std::vector<double>(6, 0.0)));
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5, 0.0)),
               std::invalid_argument);
  EXPECT_THROW(Tensor({0, 3}), std::invalid_argument);
}

TEST(TensorTest, ElementwiseAdd) {
  const Tensor a({2}, {1.0, 2.0});
  const Tensor b({2}, {3.0, 4.0});
  const Tensor out = add(a, b);
  EXPECT_DOUBLE_EQ(out[0], 4.0);
  EXPECT_DOUBLE_EQ(out[1], 6.0);
}

TEST(TensorTest, AddZerosIsIdentity) {
  Rng rng(11);
  const Tensor x = random_tensor(rng, {3, 4});
  const Tensor out = add(x, Tensor::zeros_like(x));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(out[i], x[i]);
}

TEST(TensorTest, AddInverse) {
  const Tensor out = add(Tensor({1}, {0.5}), Tensor({1}, {-0.5}));
  EXPECT_DOUBLE_EQ(out[0], 0.0);
}

TEST(TensorTest, AddRejectsShapeMismatch) {
  EXPECT_THROW(add(Tensor({2}), Tensor({3})), std::invalid_argument);
  EXPECT_THROW(mul(Tensor({2, 2}), Tensor({4})), std::invalid_argument);
}

TEST(TensorTest, OperationsDoNotMutateInputs) {
  Rng rng(7);
  const Tensor a = random_tensor(rng, {3, 3});
  const Tensor b = random_tensor(rng, {3, 3});
  const Tensor a_copy = a;
  const Tensor b_copy = b;
  (void)add(a, b);
  (void)mul(a, b);
  (void)matmul(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], a_copy[i]);
    EXPECT_EQ(b[i], b_copy[i]);
  }
}

TEST(TensorTest, MatmulIdentity) {
  const Tensor eye({2, 2}, {1.0, 0.0, 0.0, 1.0});
  const Tensor m({2, 2}, {1.0, 2.0, 3.0, 4.0});
  expect_close(matmul(eye, m), m);
}

TEST(TensorTest, MatmulBasisSelection) {
  const Tensor row({1, 2}, {1.0, 0.0});
  const Tensor col({2, 1}, {2.0, 5.0});
  const Tensor out = matmul(row, col);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0], 2.0);
}

TEST(TensorTest, MatmulMatchesTripleLoopOracle) {
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    const std::size_t m = 1 + rng.index(16);
    const std::size_t k = 1 + rng.index(16);
    const std::size_t n = 1 + rng.index(16);
    const Tensor a = random_tensor(rng, {m, k});
    const Tensor b = random_tensor(rng, {k, n});
    expect_close(matmul(a, b), matmul_oracle(a, b));
  }
}

TEST(TensorTest, MatmulRejectsInnerMismatch) {
  EXPECT_THROW(matmul(Tensor({2, 3}), Tensor({4, 2})), std::invalid_argument);
}

TEST(TensorTest, MatvecMatchesMatmul) {
  Rng rng(3);
  const Tensor x = random_tensor(rng, {5});
  const Tensor w = random_tensor(rng, {5, 3});
  const Tensor via_matmul = matmul(Tensor({1, 5}, x.vec()), w);
  const Tensor out = matvec(x, w);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(out[j], via_matmul[j], 1e-12);
  }
}

TEST(TensorTest, Conv2dIdentityKernel) {
  Rng rng(5);
  const Tensor input = random_tensor(rng, {1, 3, 3});
  const Tensor kernel({1, 1, 1, 1}, {1.0});
  expect_close(conv2d(input, kernel, 1, 0), input);
}

TEST(TensorTest, Conv2dSummationKernel) {
  const Tensor input = Tensor::full({1, 3, 3}, 1.0);
  const Tensor kernel = Tensor::full({1, 1, 3, 3}, 1.0);
  const Tensor out = conv2d(input, kernel, 1, 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0], 9.0);
}

TEST(TensorTest, Conv2dMatchesDirectSummationOracle) {
  Rng rng(99);
  const Tensor input = random_tensor(rng, {2, 5, 5});
  const Tensor kernel = random_tensor(rng, {3, 2, 3, 3});
  expect_close(conv2d(input, kernel, 1, 0), conv2d_oracle(input, kernel, 1, 0));
  expect_close(conv2d(input, kernel, 2, 1), conv2d_oracle(input, kernel, 2, 1));
  expect_close(conv2d(input, kernel, 1, 2), conv2d_oracle(input, kernel, 1, 2));
}

TEST(TensorTest, Conv2dRejectsNonIntegralExtent) {
  const Tensor input({1, 5, 5});
  const Tensor kernel({1, 1, 2, 2});
  EXPECT_THROW(conv2d(input, kernel, 2, 0), std::invalid_argument);
}

TEST(TensorTest, Conv2dRejectsOversizedKernel) {
  EXPECT_THROW(conv2d(Tensor({1, 2, 2}), Tensor({1, 1, 3, 3}), 1, 0),
               std::invalid_argument);
}

TEST(TensorTest, ReshapeKeepsDataChecksSize) {
  const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor r = reshape(t, {6});
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(r[i], t[i]);
  EXPECT_THROW(reshape(t, {5}), std::invalid_argument);
}

TEST(TensorTest, Reductions) {
  const Tensor t({4}, {1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(sum(t), 10.0);
  EXPECT_DOUBLE_EQ(mean(t), 2.5);
}

TEST(TensorTest, GreaterEqual) {
  const Tensor t({3}, {-1.0, 0.0, 2.5});
  const Tensor out = greater_equal(t, 0.0);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[1], 1.0);
  EXPECT_DOUBLE_EQ(out[2], 1.0);
}
