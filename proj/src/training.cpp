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

#include "spikekit/training.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spikekit {

OptimizerState make_optimizer_state(const std::vector<Parameter>& params,
                                    double momentum, double weight_decay,
                                    double base_lr) {
  if (momentum < 0.0 || momentum >= 1.0) {
    throw std::invalid_argument("optimizer: momentum must lie in [0, 1)");
  }
  if (weight_decay < 0.0) {
    throw std::invalid_argument("optimizer: weight_decay must be >= 0");
  }
  if (!(base_lr > 0.0)) {
    throw std::invalid_argument("optimizer: base_lr must be > 0");
  }
  OptimizerState state;
  state.momentum = momentum;
  state.weight_decay = weight_decay;
  state.base_lr = base_lr;
  state.velocity.reserve(params.size());
  for (const Parameter& p : params) {
    state.velocity.push_back(Tensor(p.value.shape()));
  }
  return state;
}

void sgd_step(std::vector<Parameter>& params, const std::vector<Tensor>& grads,
              OptimizerState& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.velocity.size()) {
    throw std::invalid_argument("sgd_step: parameter, gradient, and velocity "
                                "counts disagree");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& value = params[p].value;
    const Tensor& grad = grads[p];
    Tensor& vel = state.velocity[p];
    if (!same_shape(value, grad) || !same_shape(value, vel)) {
      throw std::invalid_argument("sgd_step: shape mismatch for parameter " +
                                  params[p].name);
    }
    const double decay = params[p].weight_decay ? state.weight_decay : 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
      vel[i] = state.momentum * vel[i] + grad[i] + decay * value[i];
      value[i] -= lr * vel[i];
    }
  }
}

double cosine_lr(const ScheduleState& state) {
  if (state.total_epochs < 1) {
    throw std::invalid_argument("cosine_lr: total_epochs must be >= 1");
  }
  if (state.epoch > state.total_epochs) {
    throw std::invalid_argument("cosine_lr: epoch exceeds total_epochs");
  }
  const double progress = static_cast<double>(state.epoch) /
                          static_cast<double>(state.total_epochs);
  return state.min_lr + 0.5 * (state.base_lr - state.min_lr) *
                            (1.0 + std::cos(3.14159265358979323846 * progress));
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (!same_shape(pred, target)) {
    throw std::invalid_argument("mse_loss: shape mismatch " +
                                shape_to_string(pred.shape()) + " vs " +
                                shape_to_string(target.shape()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

ValueId mse_loss(Tape& tape, ValueId pred, const Tensor& target) {
  const ValueId target_id = tape.leaf(target);
  const ValueId diff = tape.sub(pred, target_id);
  return tape.mean(tape.mul(diff, diff));
}

SyntheticSample flip_horizontal(const SyntheticSample& sample) {
  const Tensor& img = sample.image;
  if (img.rank() != 3) {
    throw std::invalid_argument("flip_horizontal: image must be [C, H, W]");
  }
  const std::size_t c = img.shape()[0];
  const std::size_t h = img.shape()[1];
  const std::size_t w = img.shape()[2];
  SyntheticSample out = sample;
  for (std::size_t ci = 0; ci < c; ++ci) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out.image.at(ci, y, x) = img.at(ci, y, w - 1 - x);
      }
    }
  }
  // 1 - x - w can land a hair below zero when x + w rounds up to 1.
  for (Box& box : out.boxes) box.x = std::max(0.0, 1.0 - box.x - box.w);
  if (out.target.size() == 4) {
    out.target[0] = std::max(0.0, 1.0 - out.target[0] - out.target[2]);
  }
  return out;
}

Tensor normalize_image(const Tensor& image, double mean, double std_dev) {
  if (!(std_dev > 0.0)) {
    throw std::invalid_argument("normalize_image: std must be > 0");
  }
  Tensor out = Tensor::zeros_like(image);
  for (std::size_t i = 0; i < image.size(); ++i) {
    out[i] = (image[i] - mean) / std_dev;
  }
  return out;
}

SyntheticSample augment_with_flip(const SyntheticSample& sample, bool flip,
                                  const AugmentConfig& cfg) {
  SyntheticSample out = flip ? flip_horizontal(sample) : sample;
  out.image = normalize_image(out.image, cfg.mean, cfg.std_dev);
  return out;
}

SyntheticSample augment(const SyntheticSample& sample, Rng& rng,
                        const AugmentConfig& cfg) {
  return augment_with_flip(sample, rng.bernoulli(cfg.flip_prob), cfg);
}

}  // namespace spikekit
