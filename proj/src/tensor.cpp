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

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace spikekit {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ", ";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {

void check_extents(const Shape& shape) {
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw std::invalid_argument("tensor shape has a zero extent: " +
                                  shape_to_string(shape));
    }
  }
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!same_shape(a, b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_to_string(a.shape()) + " vs " +
                                shape_to_string(b.shape()));
  }
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_size(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (shape_size(shape_) != data_.size()) {
    throw std::invalid_argument("tensor data length " +
                                std::to_string(data_.size()) +
                                " does not match shape " +
                                shape_to_string(shape_));
  }
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::full(Shape shape, double value) {
  Tensor out(std::move(shape));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value;
  return out;
}

Tensor Tensor::zeros_like(const Tensor& other) { return Tensor(other.shape()); }

double& Tensor::at(std::size_t i, std::size_t j) {
  return data_[i * shape_[1] + j];
}
double Tensor::at(std::size_t i, std::size_t j) const {
  return data_[i * shape_[1] + j];
}
double& Tensor::at(std::size_t i, std::size_t j, std::size_t k) {
  return data_[(i * shape_[1] + j) * shape_[2] + k];
}
double Tensor::at(std::size_t i, std::size_t j, std::size_t k) const {
  return data_[(i * shape_[1] + j) * shape_[2] + k];
}
double& Tensor::at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
}
double Tensor::at(std::size_t i, std::size_t j, std::size_t k,
                  std::size_t l) const {
  return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
}

bool same_shape(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape();
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
  return out;
}

Tensor add_scalar(const Tensor& a, double addend) {
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + addend;
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw std::invalid_argument("matmul: operands must be rank 2, got " +
                                shape_to_string(a.shape()) + " and " +
                                shape_to_string(b.shape()));
  }
  if (a.shape()[1] != b.shape()[0]) {
    throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                shape_to_string(a.shape()) + " vs " +
                                shape_to_string(b.shape()));
  }
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a.at(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out.at(i, j) += aip * b.at(p, j);
      }
    }
  }
  return out;
}

Tensor matvec(const Tensor& x, const Tensor& w) {
  if (w.rank() != 2) {
    throw std::invalid_argument("matvec: weights must be rank 2, got " +
                                shape_to_string(w.shape()));
  }
  if (x.size() != w.shape()[0]) {
    throw std::invalid_argument(
        "matvec: input length " + std::to_string(x.size()) +
        " does not match weight rows " + std::to_string(w.shape()[0]));
  }
  const std::size_t n = w.shape()[0];
  const std::size_t m = w.shape()[1];
  Tensor out({m});
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) out[j] += xi * w.at(i, j);
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) {
    throw std::invalid_argument("transpose: operand must be rank 2, got " +
                                shape_to_string(a.shape()));
  }
  const std::size_t m = a.shape()[0];
  const std::size_t n = a.shape()[1];
  Tensor out({n, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = a.at(i, j);
  }
  return out;
}

std::pair<std::size_t, std::size_t> conv2d_output_hw(std::size_t h, std::size_t w,
                                                     std::size_t kh, std::size_t kw,
                                                     std::size_t stride,
                                                     std::size_t padding) {
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be >= 1");
  const std::size_t ph = h + 2 * padding;
  const std::size_t pw = w + 2 * padding;
  if (kh > ph || kw > pw) {
    throw std::invalid_argument("conv2d: kernel exceeds padded input extents");
  }
  if ((ph - kh) % stride != 0 || (pw - kw) % stride != 0) {
    throw std::invalid_argument("conv2d: non-integral output extent");
  }
  return {(ph - kh) / stride + 1, (pw - kw) / stride + 1};
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, std::size_t stride,
              std::size_t padding) {
  if (input.rank() != 3 || kernel.rank() != 4) {
    throw std::invalid_argument("conv2d: expected input [C,H,W] and kernel "
                                "[F,C,kh,kw], got " +
                                shape_to_string(input.shape()) + " and " +
                                shape_to_string(kernel.shape()));
  }
  const std::size_t c = input.shape()[0];
  const std::size_t h = input.shape()[1];
  const std::size_t w = input.shape()[2];
  const std::size_t f = kernel.shape()[0];
  if (kernel.shape()[1] != c) {
    throw std::invalid_argument("conv2d: kernel channels " +
                                std::to_string(kernel.shape()[1]) +
                                " do not match input channels " +
                                std::to_string(c));
  }
  const std::size_t kh = kernel.shape()[2];
  const std::size_t kw = kernel.shape()[3];
  const auto [oh, ow] = conv2d_output_hw(h, w, kh, kw, stride, padding);

  Tensor out({f, oh, ow});
  for (std::size_t fi = 0; fi < f; ++fi) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double acc = 0.0;
        for (std::size_t ci = 0; ci < c; ++ci) {
          for (std::size_t ky = 0; ky < kh; ++ky) {
            const std::ptrdiff_t iy =
                static_cast<std::ptrdiff_t>(oy * stride + ky) -
                static_cast<std::ptrdiff_t>(padding);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const std::ptrdiff_t ix =
                  static_cast<std::ptrdiff_t>(ox * stride + kx) -
                  static_cast<std::ptrdiff_t>(padding);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
              acc += input.at(ci, static_cast<std::size_t>(iy),
                              static_cast<std::size_t>(ix)) *
                     kernel.at(fi, ci, ky, kx);
            }
          }
        }
        out.at(fi, oy, ox) = acc;
      }
    }
  }
  return out;
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_size(shape) != a.size()) {
    throw std::invalid_argument("reshape: new shape " + shape_to_string(shape) +
                                " has size " + std::to_string(shape_size(shape)) +
                                ", tensor has " + std::to_string(a.size()));
  }
  return Tensor(std::move(shape), a.vec());
}

double sum(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i];
  return acc;
}

double mean(const Tensor& a) { return sum(a) / static_cast<double>(a.size()); }

Tensor greater_equal(const Tensor& a, double threshold) {
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] >= threshold ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace spikekit
