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

#include "spikekit/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "spikekit/neuron.hpp"

namespace spikekit {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
}  // namespace

void validate(const SurrogateConfig& cfg) {
  if (!(cfg.alpha > 0.0)) {
    throw std::invalid_argument("SurrogateConfig: alpha must be > 0, got " +
                                std::to_string(cfg.alpha));
  }
}

double surrogate_value(double x, const SurrogateConfig& cfg) {
  return std::atan(kHalfPi * cfg.alpha * x) / kPi + 0.5;
}

double surrogate_grad(double x, const SurrogateConfig& cfg) {
  const double z = kHalfPi * cfg.alpha * x;
  return cfg.alpha / (2.0 * (1.0 + z * z));
}

ValueId Tape::push(Tensor value,
                   std::function<void(Tape&, const Tensor&)> backprop) {
  if (backward_done_) {
    throw std::logic_error("Tape: recording after backward() is not allowed");
  }
  nodes_.push_back(Node{std::move(value), std::move(backprop)});
  return nodes_.size() - 1;
}

void Tape::check_id(ValueId id) const {
  if (id >= nodes_.size()) {
    throw std::invalid_argument("Tape: unknown value id " + std::to_string(id));
  }
}

ValueId Tape::leaf(Tensor value) { return push(std::move(value), nullptr); }

ValueId Tape::add(ValueId a, ValueId b) {
  check_id(a);
  check_id(b);
  Tensor out = spikekit::add(value(a), value(b));
  return push(std::move(out), [a, b](Tape& t, const Tensor& gout) {
    t.accumulate(a, gout);
    t.accumulate(b, gout);
  });
}

ValueId Tape::sub(ValueId a, ValueId b) {
  check_id(a);
  check_id(b);
  Tensor out = spikekit::sub(value(a), value(b));
  return push(std::move(out), [a, b](Tape& t, const Tensor& gout) {
    t.accumulate(a, gout);
    t.accumulate(b, spikekit::scale(gout, -1.0));
  });
}

ValueId Tape::mul(ValueId a, ValueId b) {
  check_id(a);
  check_id(b);
  Tensor out = spikekit::mul(value(a), value(b));
  return push(std::move(out), [a, b](Tape& t, const Tensor& gout) {
    t.accumulate(a, spikekit::mul(gout, t.value(b)));
    t.accumulate(b, spikekit::mul(gout, t.value(a)));
  });
}

ValueId Tape::scale(ValueId a, double factor) {
  check_id(a);
  Tensor out = spikekit::scale(value(a), factor);
  return push(std::move(out), [a, factor](Tape& t, const Tensor& gout) {
    t.accumulate(a, spikekit::scale(gout, factor));
  });
}

ValueId Tape::add_scalar(ValueId a, double addend) {
  check_id(a);
  Tensor out = spikekit::add_scalar(value(a), addend);
  return push(std::move(out), [a](Tape& t, const Tensor& gout) {
    t.accumulate(a, gout);
  });
}

ValueId Tape::matvec(ValueId x, ValueId w) {
  check_id(x);
  check_id(w);
  Tensor out = spikekit::matvec(value(x), value(w));
  return push(std::move(out), [x, w](Tape& t, const Tensor& gout) {
    const Tensor& xv = t.value(x);
    const Tensor& wv = t.value(w);
    const std::size_t n = wv.shape()[0];
    const std::size_t m = wv.shape()[1];
    Tensor gx(xv.shape());
    Tensor gw(wv.shape());
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        acc += wv.at(i, j) * gout[j];
        gw.at(i, j) = xv[i] * gout[j];
      }
      gx[i] = acc;
    }
    t.accumulate(x, gx);
    t.accumulate(w, gw);
  });
}

ValueId Tape::matmul(ValueId a, ValueId b) {
  check_id(a);
  check_id(b);
  Tensor out = spikekit::matmul(value(a), value(b));
  return push(std::move(out), [a, b](Tape& t, const Tensor& gout) {
    t.accumulate(a, spikekit::matmul(gout, spikekit::transpose(t.value(b))));
    t.accumulate(b, spikekit::matmul(spikekit::transpose(t.value(a)), gout));
  });
}

ValueId Tape::conv2d(ValueId input, ValueId kernel, std::size_t stride,
                     std::size_t padding) {
  check_id(input);
  check_id(kernel);
  Tensor out = spikekit::conv2d(value(input), value(kernel), stride, padding);
  return push(std::move(out), [input, kernel, stride, padding](
                                  Tape& t, const Tensor& gout) {
    const Tensor& in = t.value(input);
    const Tensor& k = t.value(kernel);
    const std::size_t c = in.shape()[0];
    const std::size_t h = in.shape()[1];
    const std::size_t w = in.shape()[2];
    const std::size_t f = k.shape()[0];
    const std::size_t kh = k.shape()[2];
    const std::size_t kw = k.shape()[3];
    const std::size_t oh = gout.shape()[1];
    const std::size_t ow = gout.shape()[2];

    Tensor gin(in.shape());
    Tensor gk(k.shape());
    for (std::size_t fi = 0; fi < f; ++fi) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const double g = gout.at(fi, oy, ox);
          if (g == 0.0) continue;
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
                const auto uy = static_cast<std::size_t>(iy);
                const auto ux = static_cast<std::size_t>(ix);
                gin.at(ci, uy, ux) += g * k.at(fi, ci, ky, kx);
                gk.at(fi, ci, ky, kx) += g * in.at(ci, uy, ux);
              }
            }
          }
        }
      }
    }
    t.accumulate(input, gin);
    t.accumulate(kernel, gk);
  });
}

ValueId Tape::add_channel_bias(ValueId x, ValueId bias) {
  check_id(x);
  check_id(bias);
  const Tensor& xv = value(x);
  const Tensor& bv = value(bias);
  if (xv.rank() != 3 || bv.rank() != 1 || bv.size() != xv.shape()[0]) {
    throw std::invalid_argument("add_channel_bias: expected x [F,H,W] and "
                                "bias [F], got " +
                                shape_to_string(xv.shape()) + " and " +
                                shape_to_string(bv.shape()));
  }
  Tensor out = xv;
  const std::size_t f = xv.shape()[0];
  const std::size_t hw = xv.shape()[1] * xv.shape()[2];
  for (std::size_t fi = 0; fi < f; ++fi) {
    for (std::size_t i = 0; i < hw; ++i) out[fi * hw + i] += bv[fi];
  }
  return push(std::move(out), [x, bias, f, hw](Tape& t, const Tensor& gout) {
    t.accumulate(x, gout);
    Tensor gb({f});
    for (std::size_t fi = 0; fi < f; ++fi) {
      double acc = 0.0;
      for (std::size_t i = 0; i < hw; ++i) acc += gout[fi * hw + i];
      gb[fi] = acc;
    }
    t.accumulate(bias, gb);
  });
}

ValueId Tape::reshape(ValueId a, Shape shape) {
  check_id(a);
  Tensor out = spikekit::reshape(value(a), shape);
  return push(std::move(out), [a](Tape& t, const Tensor& gout) {
    t.accumulate(a, spikekit::reshape(gout, t.value(a).shape()));
  });
}

ValueId Tape::gather(ValueId a, std::vector<std::size_t> indices) {
  check_id(a);
  const Tensor& av = value(a);
  if (indices.empty()) {
    throw std::invalid_argument("gather: index list must not be empty");
  }
  for (std::size_t idx : indices) {
    if (idx >= av.size()) {
      throw std::invalid_argument("gather: index " + std::to_string(idx) +
                                  " out of range for size " +
                                  std::to_string(av.size()));
    }
  }
  Tensor out({indices.size()});
  for (std::size_t k = 0; k < indices.size(); ++k) out[k] = av[indices[k]];
  return push(std::move(out),
              [a, indices = std::move(indices)](Tape& t, const Tensor& gout) {
                Tensor ga(t.value(a).shape());
                for (std::size_t k = 0; k < indices.size(); ++k) {
                  ga[indices[k]] += gout[k];
                }
                t.accumulate(a, ga);
              });
}

ValueId Tape::sum(ValueId a) {
  check_id(a);
  Tensor out = Tensor::scalar(spikekit::sum(value(a)));
  return push(std::move(out), [a](Tape& t, const Tensor& gout) {
    t.accumulate(a, Tensor::full(t.value(a).shape(), gout[0]));
  });
}

ValueId Tape::mean(ValueId a) {
  check_id(a);
  const double inv_n = 1.0 / static_cast<double>(value(a).size());
  Tensor out = Tensor::scalar(spikekit::mean(value(a)));
  return push(std::move(out), [a, inv_n](Tape& t, const Tensor& gout) {
    t.accumulate(a, Tensor::full(t.value(a).shape(), gout[0] * inv_n));
  });
}

ValueId Tape::spike(ValueId v_minus_th, const SurrogateConfig& cfg,
                    SpikeMode mode) {
  check_id(v_minus_th);
  validate(cfg);
  const Tensor& x = value(v_minus_th);
  Tensor out = Tensor::zeros_like(x);
  if (mode == SpikeMode::kBinary) {
    out = heaviside(x);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = surrogate_value(x[i], cfg);
    }
  }
  return push(std::move(out), [v_minus_th, cfg](Tape& t, const Tensor& gout) {
    const Tensor& xv = t.value(v_minus_th);
    Tensor gx(xv.shape());
    for (std::size_t i = 0; i < xv.size(); ++i) {
      gx[i] = gout[i] * surrogate_grad(xv[i], cfg);
    }
    t.accumulate(v_minus_th, gx);
  });
}

ValueId Tape::softmax_cross_entropy(ValueId logits, std::size_t target_class) {
  check_id(logits);
  const Tensor& lv = value(logits);
  if (lv.rank() != 1 || target_class >= lv.size()) {
    throw std::invalid_argument("softmax_cross_entropy: logits must be rank 1 "
                                "with target_class in range");
  }
  const double m = *std::max_element(lv.vec().begin(), lv.vec().end());
  double exp_sum = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) exp_sum += std::exp(lv[i] - m);
  const double lse = m + std::log(exp_sum);
  Tensor out = Tensor::scalar(lse - lv[target_class]);
  return push(std::move(out),
              [logits, target_class, m, exp_sum](Tape& t, const Tensor& gout) {
                const Tensor& l = t.value(logits);
                Tensor gl(l.shape());
                for (std::size_t i = 0; i < l.size(); ++i) {
                  const double softmax_i = std::exp(l[i] - m) / exp_sum;
                  gl[i] = gout[0] * (softmax_i -
                                     (i == target_class ? 1.0 : 0.0));
                }
                t.accumulate(logits, gl);
              });
}

void Tape::accumulate(ValueId id, const Tensor& g) {
  if (!grad_set_[id]) {
    grads_[id] = g;
    grad_set_[id] = true;
  } else {
    grads_[id] = spikekit::add(grads_[id], g);
  }
}

void Tape::backward(ValueId loss) {
  check_id(loss);
  if (backward_done_) {
    throw std::logic_error("Tape: backward() may run only once per tape");
  }
  if (!nodes_[loss].value.is_scalar()) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                shape_to_string(nodes_[loss].value.shape()));
  }
  backward_done_ = true;
  grads_.assign(nodes_.size(), Tensor());
  grad_set_.assign(nodes_.size(), false);
  accumulate(loss, Tensor::scalar(1.0));
  for (std::size_t i = loss + 1; i-- > 0;) {
    if (!grad_set_[i] || !nodes_[i].backprop) continue;
    nodes_[i].backprop(*this, grads_[i]);
  }
}

Tensor Tape::grad(ValueId id) const {
  check_id(id);
  if (!backward_done_) {
    throw std::logic_error("Tape: grad() queried before backward()");
  }
  if (!grad_set_[id]) return Tensor(nodes_[id].value.shape());
  return grads_[id];
}

}  // namespace spikekit
