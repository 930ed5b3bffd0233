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

#include "spikekit/neuron.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace spikekit {

void validate(const IFConfig& cfg) {
  if (!(cfg.v_threshold > 0.0)) {
    throw std::invalid_argument("IFConfig: v_threshold must be > 0, got " +
                                std::to_string(cfg.v_threshold));
  }
}

NeuronState make_neuron_state(const Shape& neuron_shape, const IFConfig& cfg) {
  validate(cfg);
  return NeuronState{Tensor::full(neuron_shape, cfg.v_init)};
}

Shape SpikeTrain::neuron_shape() const {
  Shape s(values.shape().begin() + 1, values.shape().end());
  return s;
}

std::size_t SpikeTrain::neurons_per_step() const {
  return shape_size(neuron_shape());
}

Tensor SpikeTrain::step(std::size_t t) const {
  const std::size_t n = neurons_per_step();
  Tensor out(neuron_shape());
  const double* src = values.data() + t * n;
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i];
  return out;
}

bool is_binary(const Tensor& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0 && t[i] != 1.0) return false;
  }
  return true;
}

SpikeTrain make_spike_train(Tensor values) {
  if (values.rank() < 2) {
    throw std::invalid_argument(
        "SpikeTrain: values need a leading time axis plus a neuron shape, got " +
        shape_to_string(values.shape()));
  }
  if (!is_binary(values)) {
    throw std::invalid_argument("SpikeTrain: entries must be exactly 0 or 1");
  }
  return SpikeTrain{std::move(values)};
}

Tensor heaviside(const Tensor& x) { return greater_equal(x, 0.0); }

StepResult if_step(const NeuronState& state, const Tensor& input_current,
                   const IFConfig& cfg) {
  validate(cfg);
  if (!same_shape(state.v_mem, input_current)) {
    throw std::invalid_argument("if_step: state shape " +
                                shape_to_string(state.v_mem.shape()) +
                                " does not match current shape " +
                                shape_to_string(input_current.shape()));
  }
  Tensor v_pre = add(state.v_mem, input_current);
  Tensor spikes = heaviside(add_scalar(v_pre, -cfg.v_threshold));
  Tensor v_new = sub(v_pre, scale(spikes, cfg.v_threshold));
  return StepResult{std::move(spikes), NeuronState{std::move(v_new)}};
}

Tensor synaptic_current(const Tensor& spikes_in, const Tensor& weights,
                        const Tensor& bias) {
  return add(matvec(spikes_in, weights), bias);
}

namespace {

SpikeTrain run_over_time(const Tensor& train_in, const Shape& out_neuron_shape,
                         const IFConfig& cfg,
                         const std::function<Tensor(const Tensor&)>& drive) {
  if (train_in.rank() < 2 || train_in.shape()[0] < 1) {
    throw std::invalid_argument("run_layer: input train needs shape [T, ...] "
                                "with T >= 1, got " +
                                shape_to_string(train_in.shape()));
  }
  const std::size_t t_steps = train_in.shape()[0];
  const Shape in_shape(train_in.shape().begin() + 1, train_in.shape().end());
  const std::size_t in_per_step = shape_size(in_shape);
  const std::size_t out_per_step = shape_size(out_neuron_shape);

  NeuronState state = make_neuron_state(out_neuron_shape, cfg);
  Shape out_shape = out_neuron_shape;
  out_shape.insert(out_shape.begin(), t_steps);
  Tensor out(out_shape);

  for (std::size_t t = 0; t < t_steps; ++t) {
    Tensor in_t(in_shape);
    const double* src = train_in.data() + t * in_per_step;
    for (std::size_t i = 0; i < in_per_step; ++i) in_t[i] = src[i];
    StepResult step = if_step(state, drive(in_t), cfg);
    state = std::move(step.state);
    double* dst = out.data() + t * out_per_step;
    for (std::size_t i = 0; i < out_per_step; ++i) dst[i] = step.spikes[i];
  }
  return SpikeTrain{std::move(out)};
}

}  // namespace

SpikeTrain run_dense_layer(const Tensor& train_in, const Tensor& weights,
                           const Tensor& bias, const IFConfig& cfg) {
  const Shape out_shape{weights.shape()[1]};
  return run_over_time(train_in, out_shape, cfg, [&](const Tensor& in_t) {
    Tensor flat = in_t.rank() == 1 ? in_t : reshape(in_t, {in_t.size()});
    return synaptic_current(flat, weights, bias);
  });
}

SpikeTrain run_conv_layer(const Tensor& train_in, const Tensor& kernel,
                          const Tensor& bias, std::size_t stride,
                          std::size_t padding, const IFConfig& cfg) {
  if (train_in.rank() != 4) {
    throw std::invalid_argument("run_conv_layer: input train must be "
                                "[T, C, H, W], got " +
                                shape_to_string(train_in.shape()));
  }
  const auto [oh, ow] =
      conv2d_output_hw(train_in.shape()[2], train_in.shape()[3],
                       kernel.shape()[2], kernel.shape()[3], stride, padding);
  const std::size_t f = kernel.shape()[0];
  if (bias.size() != f) {
    throw std::invalid_argument("run_conv_layer: bias length must equal the "
                                "filter count");
  }
  const Shape out_shape{f, oh, ow};
  return run_over_time(train_in, out_shape, cfg, [&](const Tensor& in_t) {
    Tensor cur = conv2d(in_t, kernel, stride, padding);
    for (std::size_t fi = 0; fi < f; ++fi) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) cur.at(fi, y, x) += bias[fi];
      }
    }
    return cur;
  });
}

SpikeTrain run_layer(const SpikeTrain& spike_train_in, const Tensor& weights,
                     const Tensor& bias, const IFConfig& cfg) {
  return run_dense_layer(spike_train_in.values, weights, bias, cfg);
}

}  // namespace spikekit
