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

#include "spikekit/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace spikekit {

LayerSpec dense_layer(std::size_t units) {
  LayerSpec spec;
  spec.kind = LayerKind::kDense;
  spec.units = units;
  return spec;
}

LayerSpec conv_layer(std::size_t filters, std::size_t kernel,
                     std::size_t stride, std::size_t padding) {
  LayerSpec spec;
  spec.kind = LayerKind::kConv2d;
  spec.filters = filters;
  spec.kernel = kernel;
  spec.stride = stride;
  spec.padding = padding;
  return spec;
}

std::vector<Shape> layer_output_shapes(const NetworkSpec& spec) {
  std::vector<Shape> shapes;
  Shape current = spec.input_shape;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const LayerSpec& layer = spec.layers[l];
    if (layer.kind == LayerKind::kDense) {
      if (layer.units == 0) {
        throw std::invalid_argument("layer " + std::to_string(l) +
                                    ": dense units must be >= 1");
      }
      current = Shape{layer.units};
    } else {
      if (current.size() != 3) {
        throw std::invalid_argument("layer " + std::to_string(l) +
                                    ": conv needs a [C,H,W] input, got " +
                                    shape_to_string(current));
      }
      if (layer.filters == 0 || layer.kernel == 0) {
        throw std::invalid_argument("layer " + std::to_string(l) +
                                    ": conv filters and kernel must be >= 1");
      }
      const auto [oh, ow] =
          conv2d_output_hw(current[1], current[2], layer.kernel, layer.kernel,
                           layer.stride, layer.padding);
      current = Shape{layer.filters, oh, ow};
    }
    shapes.push_back(current);
  }
  return shapes;
}

void validate(const NetworkSpec& spec) {
  if (spec.input_shape.empty()) {
    throw std::invalid_argument("network: input shape must not be empty");
  }
  if (spec.input_shape.size() != 1 && spec.input_shape.size() != 3) {
    throw std::invalid_argument("network: input must be [n] or [C,H,W], got " +
                                shape_to_string(spec.input_shape));
  }
  if (spec.layers.empty()) {
    throw std::invalid_argument("network: needs at least the encoding layer");
  }
  if (spec.time_steps < 1) {
    throw std::invalid_argument("network: time_steps must be >= 1");
  }
  if (spec.head_outputs < 1) {
    throw std::invalid_argument("network: head_outputs must be >= 1");
  }
  validate(spec.surrogate);
  validate(spec.head_if);
  for (const LayerSpec& layer : spec.layers) validate(layer.if_config);
  if (!spec.layers.back().has_if_neurons) {
    throw std::invalid_argument("network: the decoding head reads a spike "
                                "train, so the last layer needs IF neurons");
  }
  layer_output_shapes(spec);  // throws when geometries do not compose
}

Tensor direct_encode(const Tensor& image, std::size_t time_steps) {
  if (time_steps < 1) {
    throw std::invalid_argument("direct_encode: time_steps must be >= 1");
  }
  Shape out_shape = image.shape();
  out_shape.insert(out_shape.begin(), time_steps);
  Tensor out(out_shape);
  for (std::size_t t = 0; t < time_steps; ++t) {
    double* dst = out.data() + t * image.size();
    for (std::size_t i = 0; i < image.size(); ++i) dst[i] = image[i];
  }
  return out;
}

Tensor decode_cmd(const SpikeTrain& spike_train_in, const DecodingHead& head,
                  std::size_t time_steps) {
  if (head.mode != DecodingMode::kCmd) {
    throw std::invalid_argument("decode_cmd: head mode is not cmd");
  }
  if (spike_train_in.time_steps() != time_steps) {
    throw std::invalid_argument(
        "decode_cmd: train has " + std::to_string(spike_train_in.time_steps()) +
        " steps, expected " + std::to_string(time_steps));
  }
  Tensor acc({head.weights.shape()[1]});
  for (std::size_t t = 0; t < time_steps; ++t) {
    Tensor x = spike_train_in.step(t);
    Tensor flat = x.rank() == 1 ? x : reshape(x, {x.size()});
    acc = add(acc, matvec(flat, head.weights));
  }
  Tensor out = scale(acc, 1.0 / static_cast<double>(time_steps));
  if (head.has_bias) out = add(out, head.bias);
  return out;
}

Tensor decode_rate(const SpikeTrain& spike_train_out, std::size_t time_steps) {
  if (spike_train_out.time_steps() != time_steps) {
    throw std::invalid_argument(
        "decode_rate: train has " + std::to_string(spike_train_out.time_steps()) +
        " steps, expected " + std::to_string(time_steps));
  }
  Tensor counts(spike_train_out.neuron_shape());
  for (std::size_t t = 0; t < time_steps; ++t) {
    counts = add(counts, spike_train_out.step(t));
  }
  return scale(counts, 1.0 / static_cast<double>(time_steps));
}

Network Network::init(const NetworkSpec& spec, Rng& rng) {
  validate(spec);
  Network net;
  net.spec_ = spec;
  const std::vector<Shape> shapes = layer_output_shapes(spec);

  Shape in_shape = spec.input_shape;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const LayerSpec& layer = spec.layers[l];
    const std::string prefix = "layer" + std::to_string(l);
    Tensor weights;
    std::size_t fan_in = 0;
    std::size_t bias_len = 0;
    if (layer.kind == LayerKind::kDense) {
      fan_in = shape_size(in_shape);
      weights = Tensor({fan_in, layer.units});
      bias_len = layer.units;
    } else {
      fan_in = in_shape[0] * layer.kernel * layer.kernel;
      weights = Tensor({layer.filters, in_shape[0], layer.kernel, layer.kernel});
      bias_len = layer.filters;
    }
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = rng.normal() * std_dev;
    }
    net.weight_index_.push_back(net.params_.size());
    net.params_.push_back(Parameter{prefix + ".weights", std::move(weights), true});
    if (layer.has_bias) {
      net.bias_index_.push_back(net.params_.size());
      net.params_.push_back(Parameter{prefix + ".bias", Tensor({bias_len}), false});
    } else {
      net.bias_index_.push_back(kNoParam);
    }
    in_shape = shapes[l];
  }

  const std::size_t head_fan_in = shape_size(in_shape);
  Tensor head_w({head_fan_in, spec.head_outputs});
  const double head_std = std::sqrt(2.0 / static_cast<double>(head_fan_in));
  for (std::size_t i = 0; i < head_w.size(); ++i) {
    head_w[i] = rng.normal() * head_std;
  }
  net.head_weight_index_ = net.params_.size();
  net.params_.push_back(Parameter{"head.weights", std::move(head_w), true});
  net.head_bias_index_ = kNoParam;
  if (spec.head_bias) {
    net.head_bias_index_ = net.params_.size();
    net.params_.push_back(
        Parameter{"head.bias", Tensor({spec.head_outputs}), false});
  }
  return net;
}

const Tensor& Network::layer_weights(std::size_t layer) const {
  return params_[weight_index_[layer]].value;
}

const Tensor* Network::layer_bias(std::size_t layer) const {
  if (bias_index_[layer] == kNoParam) return nullptr;
  return &params_[bias_index_[layer]].value;
}

DecodingHead Network::head() const {
  DecodingHead head;
  head.weights = params_[head_weight_index_].value;
  head.has_bias = spec_.head_bias;
  head.bias = head.has_bias ? params_[head_bias_index_].value
                            : Tensor({spec_.head_outputs});
  head.mode = spec_.decoding;
  head.if_config = spec_.head_if;
  return head;
}

SpikeTrain Network::Forward::spike_train(std::size_t layer) const {
  return make_spike_train(layers[layer].train);
}

Network::Forward Network::forward(const Tensor& image) const {
  if (image.shape() != spec_.input_shape) {
    throw std::invalid_argument("forward: image shape " +
                                shape_to_string(image.shape()) +
                                " does not match network input " +
                                shape_to_string(spec_.input_shape));
  }
  const std::size_t t_steps = spec_.time_steps;
  Forward fwd;

  // Per-step affine drive of one layer over a whole train; used directly for
  // layers without IF neurons.
  const auto affine_train = [&](const Tensor& train_in, std::size_t l,
                                const Tensor& w, const Tensor& bias) {
    const std::size_t in_per_step = train_in.size() / t_steps;
    const Shape in_shape(train_in.shape().begin() + 1, train_in.shape().end());
    Tensor out;
    for (std::size_t t = 0; t < t_steps; ++t) {
      Tensor in_t(in_shape);
      const double* src = train_in.data() + t * in_per_step;
      for (std::size_t i = 0; i < in_per_step; ++i) in_t[i] = src[i];
      Tensor cur;
      if (spec_.layers[l].kind == LayerKind::kDense) {
        Tensor flat = in_t.rank() == 1 ? in_t : reshape(in_t, {in_t.size()});
        cur = synaptic_current(flat, w, bias);
      } else {
        cur = conv2d(in_t, w, spec_.layers[l].stride, spec_.layers[l].padding);
        const std::size_t hw = cur.shape()[1] * cur.shape()[2];
        for (std::size_t fi = 0; fi < cur.shape()[0]; ++fi) {
          for (std::size_t i = 0; i < hw; ++i) cur[fi * hw + i] += bias[fi];
        }
      }
      if (t == 0) {
        Shape out_shape = cur.shape();
        out_shape.insert(out_shape.begin(), t_steps);
        out = Tensor(out_shape);
      }
      double* dst = out.data() + t * cur.size();
      for (std::size_t i = 0; i < cur.size(); ++i) dst[i] = cur[i];
    }
    return out;
  };

  Tensor train = direct_encode(image, t_steps);
  for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
    const LayerSpec& layer = spec_.layers[l];
    const Tensor& w = layer_weights(l);
    const Tensor* b = layer_bias(l);
    Tensor bias = b != nullptr
                      ? *b
                      : Tensor({layer.kind == LayerKind::kDense ? layer.units
                                                                : layer.filters});
    if (layer.has_if_neurons) {
      SpikeTrain out = layer.kind == LayerKind::kDense
                           ? run_dense_layer(train, w, bias, layer.if_config)
                           : run_conv_layer(train, w, bias, layer.stride,
                                            layer.padding, layer.if_config);
      train = out.values;
      fwd.layers.push_back(LayerOutput{train, true});
    } else {
      train = affine_train(train, l, w, bias);
      fwd.layers.push_back(LayerOutput{train, false});
    }
  }

  SpikeTrain last{train};
  const DecodingHead head_cfg = head();
  if (spec_.decoding == DecodingMode::kCmd) {
    fwd.output = decode_cmd(last, head_cfg, t_steps);
  } else {
    SpikeTrain head_spikes = run_dense_layer(last.values, head_cfg.weights,
                                             head_cfg.bias, head_cfg.if_config);
    fwd.head_train = head_spikes.values;
    fwd.output = decode_rate(head_spikes, t_steps);
  }
  return fwd;
}

Network::Taped Network::forward(Tape& tape, const Tensor& image,
                                SpikeMode mode) const {
  if (image.shape() != spec_.input_shape) {
    throw std::invalid_argument("forward: image shape " +
                                shape_to_string(image.shape()) +
                                " does not match network input " +
                                shape_to_string(spec_.input_shape));
  }
  const std::size_t t_steps = spec_.time_steps;
  Taped result;

  const ValueId image_id = tape.leaf(image);
  result.param_ids.reserve(params_.size());
  for (const Parameter& p : params_) {
    result.param_ids.push_back(tape.leaf(p.value));
  }

  auto flatten = [&](ValueId id) {
    const Tensor& v = tape.value(id);
    return v.rank() == 1 ? id : tape.reshape(id, {v.size()});
  };

  // Synaptic drive of layer l for the step input in_id.
  auto layer_current = [&](std::size_t l, ValueId in_id) {
    const LayerSpec& layer = spec_.layers[l];
    const ValueId w_id = result.param_ids[weight_index_[l]];
    if (layer.kind == LayerKind::kDense) {
      ValueId cur = tape.matvec(flatten(in_id), w_id);
      if (bias_index_[l] != kNoParam) {
        cur = tape.add(cur, result.param_ids[bias_index_[l]]);
      }
      return cur;
    }
    ValueId cur = tape.conv2d(in_id, w_id, layer.stride, layer.padding);
    if (bias_index_[l] != kNoParam) {
      cur = tape.add_channel_bias(cur, result.param_ids[bias_index_[l]]);
    }
    return cur;
  };

  // One IF update on the tape; returns the spike node and the new potential.
  auto if_update = [&](ValueId v_prev, ValueId current, const IFConfig& cfg)
      -> std::pair<ValueId, ValueId> {
    const ValueId v_pre = tape.add(v_prev, current);
    const ValueId shifted = tape.add_scalar(v_pre, -cfg.v_threshold);
    const ValueId s = tape.spike(shifted, spec_.surrogate, mode);
    const ValueId reset_src =
        spec_.detach_reset ? tape.leaf(tape.value(s)) : s;
    const ValueId v_new =
        tape.sub(v_pre, tape.scale(reset_src, cfg.v_threshold));
    return {s, v_new};
  };

  const std::vector<Shape> shapes = layer_output_shapes(spec_);
  const std::size_t n_layers = spec_.layers.size();
  result.layer_spike_steps.assign(n_layers, {});

  std::vector<ValueId> v_state(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    v_state[l] =
        tape.leaf(Tensor::full(shapes[l], spec_.layers[l].if_config.v_init));
  }

  // The encoding layer sees the same image every step, so its drive is one
  // shared node.
  const ValueId encoding_current = layer_current(0, image_id);

  const ValueId head_w_id = result.param_ids[head_weight_index_];
  ValueId head_acc = 0;
  bool head_acc_set = false;
  ValueId head_v = 0;
  if (spec_.decoding == DecodingMode::kRate) {
    head_v = tape.leaf(Tensor::full({spec_.head_outputs}, spec_.head_if.v_init));
  }

  for (std::size_t t = 0; t < t_steps; ++t) {
    ValueId layer_in = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const ValueId cur = l == 0 ? encoding_current : layer_current(l, layer_in);
      ValueId layer_out = cur;
      if (spec_.layers[l].has_if_neurons) {
        auto [s, v_new] = if_update(v_state[l], cur, spec_.layers[l].if_config);
        v_state[l] = v_new;
        layer_out = s;
      }
      result.layer_spike_steps[l].push_back(layer_out);
      layer_in = layer_out;
    }

    ValueId head_cur = tape.matvec(flatten(layer_in), head_w_id);
    if (spec_.decoding == DecodingMode::kCmd) {
      head_acc = head_acc_set ? tape.add(head_acc, head_cur) : head_cur;
      head_acc_set = true;
    } else {
      if (head_bias_index_ != kNoParam) {
        head_cur = tape.add(head_cur, result.param_ids[head_bias_index_]);
      }
      auto [s, v_new] = if_update(head_v, head_cur, spec_.head_if);
      head_v = v_new;
      head_acc = head_acc_set ? tape.add(head_acc, s) : s;
      head_acc_set = true;
    }
  }

  ValueId out = tape.scale(head_acc, 1.0 / static_cast<double>(t_steps));
  if (spec_.decoding == DecodingMode::kCmd && head_bias_index_ != kNoParam) {
    out = tape.add(out, result.param_ids[head_bias_index_]);
  }
  result.output = out;
  return result;
}

}  // namespace spikekit
