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

#ifndef SPIKEKIT_TENSOR_HPP
#define SPIKEKIT_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace spikekit {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense n-dimensional array of doubles in row-major order. Tensors are
/// immutable values as far as the arithmetic below is concerned: every
/// operation returns a fresh tensor and never touches its operands.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor full(Shape shape, double value);
  static Tensor zeros_like(const Tensor& other);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  bool is_scalar() const { return data_.size() == 1; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& vec() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Row-major multi-index accessors for the ranks the library uses.
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;
  double& at(std::size_t i, std::size_t j, std::size_t k);
  double at(std::size_t i, std::size_t j, std::size_t k) const;
  double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l);
  double at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

bool same_shape(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double addend);

/// Standard matrix product of a [m x k] and b [k x n].
Tensor matmul(const Tensor& a, const Tensor& b);

/// out[j] = sum_i x[i] * w[i][j] for x [n] and w [n x m]; the synaptic weight
/// layout used throughout (row = presynaptic index).
Tensor matvec(const Tensor& x, const Tensor& w);

Tensor transpose(const Tensor& a);

std::pair<std::size_t, std::size_t> conv2d_output_hw(std::size_t h, std::size_t w,
                                                     std::size_t kh, std::size_t kw,
                                                     std::size_t stride,
                                                     std::size_t padding);

/// Cross-correlation of input [C x H x W] with kernel [F x C x kh x kw] and
/// zero padding. Output is [F x H' x W'] with H' = (H + 2p - kh)/stride + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernel, std::size_t stride,
              std::size_t padding);

Tensor reshape(const Tensor& a, Shape shape);

double sum(const Tensor& a);
double mean(const Tensor& a);

/// Elementwise comparison: out[i] = 1.0 if a[i] >= threshold else 0.0.
Tensor greater_equal(const Tensor& a, double threshold);

}  // namespace spikekit

#endif  // SPIKEKIT_TENSOR_HPP
