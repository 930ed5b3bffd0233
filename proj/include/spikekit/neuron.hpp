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

#ifndef SPIKEKIT_NEURON_HPP
#define SPIKEKIT_NEURON_HPP

#include <cstddef>
#include <utility>

#include "spikekit/tensor.hpp"

namespace spikekit {

/// Integrate-and-fire neuron parameters. The threshold comparison is >=, so a
/// membrane potential landing exactly on v_threshold emits a spike. Reset is
/// subtractive: the threshold is subtracted from the post-integration
/// potential, preserving residual charge.
struct IFConfig {
  double v_threshold = 1.0;
  double v_init = 0.0;
};

void validate(const IFConfig& cfg);

/// Per-layer membrane potentials carried across time steps within one forward
/// pass. State never leaks between samples: every pass starts from v_init.
struct NeuronState {
  Tensor v_mem;
};

NeuronState make_neuron_state(const Shape& neuron_shape, const IFConfig& cfg);

/// Binary spike record with a leading time axis: values has shape
/// [T, neuron...] and every entry is exactly 0 or 1.
struct SpikeTrain {
  Tensor values;

  std::size_t time_steps() const { return values.shape().empty() ? 0 : values.shape()[0]; }
  Shape neuron_shape() const;
  std::size_t neurons_per_step() const;
  /// Copy of the spike tensor at step t, shaped like one neuron layer.
  Tensor step(std::size_t t) const;
};

/// Validating constructor; rejects non-binary entries and T < 1.
SpikeTrain make_spike_train(Tensor values);

bool is_binary(const Tensor& t);

/// H(x): 1 where x >= 0, else 0, componentwise.
Tensor heaviside(const Tensor& x);

struct StepResult {
  Tensor spikes;
  NeuronState state;
};

/// One IF update: integrate the input current, spike where the
/// post-integration potential reaches threshold, subtract the threshold where
/// a spike fired. Spike decision and reset both read the post-integration
/// potential of the same step.
StepResult if_step(const NeuronState& state, const Tensor& input_current,
                   const IFConfig& cfg);

/// Dense synaptic drive: out = spikes_in * weights + bias with weights laid
/// out [fan_in x fan_out].
Tensor synaptic_current(const Tensor& spikes_in, const Tensor& weights,
                        const Tensor& bias);

/// Runs a dense layer of IF neurons over a whole input train [T x fan_in].
/// Input entries may be real-valued (the encoding layer sees the raw image);
/// the output train is binary. State starts from v_init, fresh per call.
SpikeTrain run_dense_layer(const Tensor& train_in, const Tensor& weights,
                           const Tensor& bias, const IFConfig& cfg);

/// Same over a [T x C x H x W] train with a conv drive and per-channel bias
/// [F]. Layers without a bias pass zeros.
SpikeTrain run_conv_layer(const Tensor& train_in, const Tensor& kernel,
                          const Tensor& bias, std::size_t stride,
                          std::size_t padding, const IFConfig& cfg);

/// Spec-named entry point for the dense case.
SpikeTrain run_layer(const SpikeTrain& spike_train_in, const Tensor& weights,
                     const Tensor& bias, const IFConfig& cfg);

}  // namespace spikekit

#endif  // SPIKEKIT_NEURON_HPP
