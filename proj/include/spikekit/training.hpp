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

#ifndef SPIKEKIT_TRAINING_HPP
#define SPIKEKIT_TRAINING_HPP

#include <cstddef>
#include <vector>

#include "spikekit/autodiff.hpp"
#include "spikekit/data.hpp"
#include "spikekit/network.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

/// SGD-with-momentum state. Velocity buffers are aligned one to one with the
/// parameter list they were built from. Weight decay is applied only to
/// parameters flagged for it (affine weights, not biases).
struct OptimizerState {
  double momentum = 0.9;
  double weight_decay = 5e-3;
  double base_lr = 0.1;
  std::vector<Tensor> velocity;
};

OptimizerState make_optimizer_state(const std::vector<Parameter>& params,
                                    double momentum, double weight_decay,
                                    double base_lr);

/// v <- momentum * v + grad + weight_decay * param; param <- param - lr * v
void sgd_step(std::vector<Parameter>& params, const std::vector<Tensor>& grads,
              OptimizerState& state, double lr);

struct ScheduleState {
  std::size_t epoch = 0;
  std::size_t total_epochs = 1;
  double base_lr = 0.1;
  double min_lr = 0.0;
};

/// min_lr + (base_lr - min_lr) * (1 + cos(pi * epoch / total)) / 2
double cosine_lr(const ScheduleState& state);

double mse_loss(const Tensor& pred, const Tensor& target);

/// Taped composition of the same mean-squared error.
ValueId mse_loss(Tape& tape, ValueId pred, const Tensor& target);

struct AugmentConfig {
  double flip_prob = 0.5;
  double mean = 0.5;
  double std_dev = 0.5;
};

/// Mirrors the image across the vertical axis and remaps every box
/// x <- 1 - x - w. An involution on raw samples.
SyntheticSample flip_horizontal(const SyntheticSample& sample);

Tensor normalize_image(const Tensor& image, double mean, double std_dev);

/// Flip with probability flip_prob, then channel normalization. The returned
/// image is normalized and no longer in [0, 1].
SyntheticSample augment(const SyntheticSample& sample, Rng& rng,
                        const AugmentConfig& cfg);

/// Deterministic variant used when the flip decision was drawn up front.
SyntheticSample augment_with_flip(const SyntheticSample& sample, bool flip,
                                  const AugmentConfig& cfg);

}  // namespace spikekit

#endif  // SPIKEKIT_TRAINING_HPP
