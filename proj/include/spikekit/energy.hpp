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

#ifndef SPIKEKIT_ENERGY_HPP
#define SPIKEKIT_ENERGY_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spikekit/network.hpp"

namespace spikekit {

/// Arithmetic-operation tally. The FLOP convention is uniform: one MAC and
/// one AC each count as one FLOP-unit, so flops() = macs + acs + bias_acs.
/// Bias integrations are tracked separately from the spike-driven
/// accumulations; energy costing treats them as ACs.
struct OpCount {
  std::uint64_t macs = 0;
  std::uint64_t acs = 0;
  std::uint64_t bias_acs = 0;

  std::uint64_t flops() const { return macs + acs + bias_acs; }
  static const char* flop_convention() {
    return "1 MAC = 1 FLOP-unit, 1 AC = 1 FLOP-unit";
  }
};

struct EnergyModel {
  double mac_energy_j = 4.6e-12;           // 32-bit floating-point MAC
  double ac_energy_j = 0.9e-12;            // 32-bit floating-point AC
  double chip_flops_per_watt = 300.0e9;    // neuromorphic-chip efficiency
  double timestep_seconds = 1.0e-3;        // duration of one simulation step
};

/// Per-connection activity record of one forward pass. A "connection" is an
/// affine map (each layer's drive plus the decoding head). synapse_events is
/// the exact event-driven accumulation count: one AC per (incoming spike,
/// downstream synapse) pair.
struct ConnectionStats {
  std::string name;
  bool input_binary = true;
  std::uint64_t structural_ops_per_step = 0;  // dense/conv fan product
  std::uint64_t bias_adds_per_step = 0;       // fan-out when the bias exists
  std::uint64_t fan_out = 0;                  // synapses per presynaptic spike (dense)
  std::uint64_t spikes_in = 0;
  std::uint64_t spikes_out = 0;
  std::uint64_t synapse_events = 0;
};

struct SpikeStats {
  std::size_t time_steps = 0;
  std::vector<ConnectionStats> connections;

  std::uint64_t total_spikes() const;
};

SpikeStats collect_spike_stats(const Network& net,
                               const Network::Forward& forward);

/// Analytic MAC count of the same architecture executed as a conventional
/// network: dense fan_in * fan_out, conv F*C*kh*kw*H'*W', summed over all
/// affine maps including the head.
OpCount count_ann_ops(const NetworkSpec& spec);

/// Input-independent SNN accounting: per-step structural sums costed as ACs
/// (or MACs for connections driven by real-valued inputs, i.e. the encoding
/// layer), multiplied by T; bias integrations once per neuron per step.
OpCount count_snn_ops_static(const NetworkSpec& spec, std::size_t time_steps);

/// Event-driven accounting from recorded spikes: acs sums the synapse events
/// of binary connections; encoding-layer MACs and bias ACs are carried in
/// their own fields.
OpCount count_snn_ops_activity(const SpikeStats& stats);

/// macs * mac_energy + (acs + bias_acs) * ac_energy, in joules.
double energy_per_op_model(const OpCount& ops, const EnergyModel& model);

/// flops / chip_flops_per_watt, in joules.
double energy_chip_model(std::uint64_t flops, const EnergyModel& model);

struct EnergyReport {
  std::size_t time_steps = 0;
  OpCount ann;
  OpCount snn_static;
  OpCount snn_activity;
  EnergyModel model;

  double ann_energy_per_op = 0.0;
  double snn_static_energy_per_op = 0.0;
  double snn_activity_energy_per_op = 0.0;
  double ann_energy_chip = 0.0;
  double snn_static_energy_chip = 0.0;
  double snn_activity_energy_chip = 0.0;

  double ratio_per_op_static = 0.0;    // ann / snn_static, per-op costing
  double ratio_per_op_activity = 0.0;
  double ratio_chip_static = 0.0;
  double ratio_chip_activity = 0.0;

  std::string note;

  /// Flat key = value record.
  std::string to_text() const;
  /// One row per costing model x network, with a header row.
  std::string to_csv() const;
};

EnergyReport build_report(const OpCount& ann, const OpCount& snn_static,
                          const OpCount& snn_activity, const EnergyModel& model,
                          std::size_t time_steps);

}  // namespace spikekit

#endif  // SPIKEKIT_ENERGY_HPP
