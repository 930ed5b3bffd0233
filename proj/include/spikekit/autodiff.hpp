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

#ifndef SPIKEKIT_AUTODIFF_HPP
#define SPIKEKIT_AUTODIFF_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "spikekit/tensor.hpp"

namespace spikekit {

/// Sharpness of the arctangent surrogate. alpha = 2 gives a unit derivative
/// at the threshold crossing.
struct SurrogateConfig {
  double alpha = 2.0;
};

void validate(const SurrogateConfig& cfg);

/// g(x) = (1/pi) * arctan((pi/2) * alpha * x) + 1/2
double surrogate_value(double x, const SurrogateConfig& cfg);

/// g'(x) = alpha / (2 * (1 + ((pi/2) * alpha * x)^2))
double surrogate_grad(double x, const SurrogateConfig& cfg);

/// Forward behaviour of a spike node. kBinary is the production path: the
/// forward value is the exact Heaviside step while the backward rule uses the
/// surrogate derivative. kSmoothed replaces the forward step with g itself,
/// turning the whole unrolled network into a differentiable function whose
/// analytic gradient the tape must reproduce; gradient-checking tests run in
/// this mode.
enum class SpikeMode { kBinary, kSmoothed };

using ValueId = std::size_t;

/// Time-unrolled computation record for reverse-mode differentiation.
/// Insertion order is the topological order: every operand of a node is
/// recorded before the node itself. One tape serves one forward/backward
/// pass and is single-threaded; run concurrent samples on separate tapes and
/// sum the resulting gradients.
class Tape {
 public:
  ValueId leaf(Tensor value);

  ValueId add(ValueId a, ValueId b);
  ValueId sub(ValueId a, ValueId b);
  ValueId mul(ValueId a, ValueId b);
  ValueId scale(ValueId a, double factor);
  ValueId add_scalar(ValueId a, double addend);
  ValueId matvec(ValueId x, ValueId w);
  ValueId matmul(ValueId a, ValueId b);
  ValueId conv2d(ValueId input, ValueId kernel, std::size_t stride,
                 std::size_t padding);
  /// x [F,H,W] plus a per-channel bias [F].
  ValueId add_channel_bias(ValueId x, ValueId bias);
  ValueId reshape(ValueId a, Shape shape);
  ValueId gather(ValueId a, std::vector<std::size_t> indices);
  ValueId sum(ValueId a);
  ValueId mean(ValueId a);

  /// Spike nonlinearity applied to the already-shifted argument v - v_th.
  /// Backward multiplies upstream by g'(v - v_th) elementwise in both modes.
  ValueId spike(ValueId v_minus_th, const SurrogateConfig& cfg, SpikeMode mode);

  /// Numerically stable -log softmax(logits)[target]; backward is
  /// softmax - onehot.
  ValueId softmax_cross_entropy(ValueId logits, std::size_t target_class);

  /// Reverse topological sweep from a scalar loss. Gradients of every node
  /// reachable from the loss are accumulated; querying any other node yields
  /// zeros. May be called once per tape.
  void backward(ValueId loss);

  const Tensor& value(ValueId id) const { return nodes_[id].value; }
  /// Gradient of the loss w.r.t. the node; valid after backward().
  Tensor grad(ValueId id) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    // Pulls this node's gradient backward into its operands' accumulators.
    std::function<void(Tape&, const Tensor&)> backprop;
  };

  ValueId push(Tensor value, std::function<void(Tape&, const Tensor&)> backprop);
  void accumulate(ValueId id, const Tensor& g);
  void check_id(ValueId id) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::vector<bool> grad_set_;
  bool backward_done_ = false;
};

}  // namespace spikekit

#endif  // SPIKEKIT_AUTODIFF_HPP
