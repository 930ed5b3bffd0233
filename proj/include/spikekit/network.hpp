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

#ifndef SPIKEKIT_NETWORK_HPP
#define SPIKEKIT_NETWORK_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spikekit/autodiff.hpp"
#include "spikekit/neuron.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

enum class LayerKind { kDense, kConv2d };

struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t units = 0;    // dense fan-out
  std::size_t filters = 0;  // conv geometry
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool has_bias = true;
  bool has_if_neurons = true;
  IFConfig if_config;
};

LayerSpec dense_layer(std::size_t units);
LayerSpec conv_layer(std::size_t filters, std::size_t kernel,
                     std::size_t stride = 1, std::size_t padding = 0);

enum class DecodingMode { kCmd, kRate };

/// Full network description: an encoding layer (layer 0, driven by the
/// real-valued input at every step), further spiking layers, and exactly one
/// decoding head after the last layer.
struct NetworkSpec {
  Shape input_shape;             // [n] or [C, H, W]
  std::vector<LayerSpec> layers;
  std::size_t head_outputs = 1;
  bool head_bias = true;
  DecodingMode decoding = DecodingMode::kCmd;
  std::size_t time_steps = 4;
  SurrogateConfig surrogate;
  IFConfig head_if;              // output neurons used by rate decoding
  bool detach_reset = false;
};

void validate(const NetworkSpec& spec);

/// Output shape of every layer, in order; throws when consecutive layer
/// geometries do not compose.
std::vector<Shape> layer_output_shapes(const NetworkSpec& spec);

/// Presents the same real-valued image at every step: output shape is
/// [time_steps, image...].
Tensor direct_encode(const Tensor& image, std::size_t time_steps);

struct DecodingHead {
  Tensor weights;  // [fan_in x fan_out]
  Tensor bias;     // [fan_out]; zeros when has_bias is false
  bool has_bias = true;
  DecodingMode mode = DecodingMode::kCmd;
  IFConfig if_config;
};

/// Current Mean Decoding: the time-mean of the head's synaptic currents,
/// out_j = (1/T) * sum_t sum_i x_i[t] * w_ij (+ b_j when enabled). Output is
/// an unconstrained real vector.
Tensor decode_cmd(const SpikeTrain& spike_train_in, const DecodingHead& head,
                  std::size_t time_steps);

/// Rate decoding: spike count of each output neuron divided by T; values are
/// integer multiples of 1/T inside [0, 1].
Tensor decode_rate(const SpikeTrain& spike_train_out, std::size_t time_steps);

struct Parameter {
  std::string name;
  Tensor value;
  bool weight_decay = false;  // decay applies to affine weights, not biases
};

class Network {
 public:
  Network() = default;

  /// Kaiming-style fan-in initialization for every affine weight; biases
  /// start at zero.
  static Network init(const NetworkSpec& spec, Rng& rng);

  const NetworkSpec& spec() const { return spec_; }
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }

  const Tensor& layer_weights(std::size_t layer) const;
  const Tensor* layer_bias(std::size_t layer) const;  // nullptr when absent
  DecodingHead head() const;

  struct LayerOutput {
    Tensor train;  // [T, neuron...]
    bool binary;
  };

  struct Forward {
    Tensor output;
    std::vector<LayerOutput> layers;
    Tensor head_train;  // rate mode: the head IF layer's spike train
    /// Validated spike-train view of a layer output.
    SpikeTrain spike_train(std::size_t layer) const;
  };

  Forward forward(const Tensor& image) const;

  struct Taped {
    ValueId output;
    std::vector<ValueId> param_ids;  // aligned with params()
    std::vector<std::vector<ValueId>> layer_spike_steps;  // [layer][t]
  };

  /// Records the unrolled forward pass onto the tape. kBinary reproduces
  /// forward() bit for bit; kSmoothed substitutes g for the Heaviside step
  /// so the recorded function is differentiable end to end.
  Taped forward(Tape& tape, const Tensor& image, SpikeMode mode) const;

 private:
  NetworkSpec spec_;
  std::vector<Parameter> params_;
  std::vector<std::size_t> weight_index_;
  std::vector<std::size_t> bias_index_;  // npos when the layer has no bias
  std::size_t head_weight_index_ = 0;
  std::size_t head_bias_index_ = 0;

  static constexpr std::size_t kNoParam = static_cast<std::size_t>(-1);
};

}  // namespace spikekit

#endif  // SPIKEKIT_NETWORK_HPP
