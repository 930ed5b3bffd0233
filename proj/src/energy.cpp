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

#include "spikekit/energy.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace spikekit {

namespace {

struct ConnectionLayout {
  std::string name;
  bool input_binary = true;
  bool is_conv = false;
  std::uint64_t structural_ops = 0;  // per step
  std::uint64_t bias_adds = 0;       // per step
  std::uint64_t fan_out = 0;         // dense: synapses per incoming spike
  // Conv coverage: how many output taps an input pixel at (y, x) feeds,
  // per filter, split into row and column factors.
  std::vector<std::uint64_t> cover_y;
  std::vector<std::uint64_t> cover_x;
  std::size_t filters = 0;
  Shape input_shape;
};

std::uint64_t axis_coverage(std::size_t pos, std::size_t kernel,
                            std::size_t stride, std::size_t padding,
                            std::size_t out_extent) {
  std::uint64_t count = 0;
  for (std::size_t k = 0; k < kernel; ++k) {
    const std::ptrdiff_t shifted = static_cast<std::ptrdiff_t>(pos + padding) -
                                   static_cast<std::ptrdiff_t>(k);
    if (shifted < 0) continue;
    if (shifted % static_cast<std::ptrdiff_t>(stride) != 0) continue;
    const std::size_t out = static_cast<std::size_t>(shifted) / stride;
    if (out < out_extent) ++count;
  }
  return count;
}

std::vector<ConnectionLayout> enumerate_connections(const NetworkSpec& spec) {
  validate(spec);
  const std::vector<Shape> shapes = layer_output_shapes(spec);
  std::vector<ConnectionLayout> out;

  Shape in_shape = spec.input_shape;
  bool input_binary = false;  // the encoding layer sees the real image
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const LayerSpec& layer = spec.layers[l];
    ConnectionLayout conn;
    conn.name = "layer" + std::to_string(l);
    conn.input_binary = input_binary;
    conn.input_shape = in_shape;
    if (layer.kind == LayerKind::kDense) {
      const std::uint64_t fan_in = shape_size(in_shape);
      conn.structural_ops = fan_in * layer.units;
      conn.bias_adds = layer.has_bias ? layer.units : 0;
      conn.fan_out = layer.units;
    } else {
      const auto [oh, ow] =
          conv2d_output_hw(in_shape[1], in_shape[2], layer.kernel, layer.kernel,
                           layer.stride, layer.padding);
      conn.is_conv = true;
      conn.filters = layer.filters;
      conn.structural_ops = static_cast<std::uint64_t>(layer.filters) *
                            in_shape[0] * layer.kernel * layer.kernel * oh * ow;
      conn.bias_adds = layer.has_bias ? layer.filters * oh * ow : 0;
      conn.fan_out = static_cast<std::uint64_t>(layer.filters) * layer.kernel *
                     layer.kernel;
      conn.cover_y.resize(in_shape[1]);
      conn.cover_x.resize(in_shape[2]);
      for (std::size_t y = 0; y < in_shape[1]; ++y) {
        conn.cover_y[y] =
            axis_coverage(y, layer.kernel, layer.stride, layer.padding, oh);
      }
      for (std::size_t x = 0; x < in_shape[2]; ++x) {
        conn.cover_x[x] =
            axis_coverage(x, layer.kernel, layer.stride, layer.padding, ow);
      }
    }
    out.push_back(std::move(conn));
    in_shape = shapes[l];
    input_binary = layer.has_if_neurons;
  }

  ConnectionLayout head;
  head.name = "head";
  head.input_binary = input_binary;
  head.input_shape = in_shape;
  const std::uint64_t head_fan_in = shape_size(in_shape);
  head.structural_ops = head_fan_in * spec.head_outputs;
  head.bias_adds = spec.head_bias ? spec.head_outputs : 0;
  head.fan_out = spec.head_outputs;
  out.push_back(std::move(head));
  return out;
}

}  // namespace

std::uint64_t SpikeStats::total_spikes() const {
  std::uint64_t total = 0;
  for (const ConnectionStats& c : connections) total += c.spikes_out;
  return total;
}

SpikeStats collect_spike_stats(const Network& net,
                               const Network::Forward& forward) {
  const NetworkSpec& spec = net.spec();
  const std::vector<ConnectionLayout> layout = enumerate_connections(spec);
  SpikeStats stats;
  stats.time_steps = spec.time_steps;

  for (std::size_t i = 0; i < layout.size(); ++i) {
    const ConnectionLayout& conn = layout[i];
    ConnectionStats cs;
    cs.name = conn.name;
    cs.input_binary = conn.input_binary;
    cs.structural_ops_per_step = conn.structural_ops;
    cs.bias_adds_per_step = conn.bias_adds;
    cs.fan_out = conn.fan_out;

    if (conn.input_binary) {
      // Input train of connection i is the output of layer i-1 (the head,
      // last connection, reads the final layer).
      const Tensor& train = forward.layers[i - 1].train;
      const std::size_t per_step = shape_size(conn.input_shape);
      for (std::size_t t = 0; t < spec.time_steps; ++t) {
        const double* step = train.data() + t * per_step;
        if (!conn.is_conv) {
          for (std::size_t p = 0; p < per_step; ++p) {
            if (step[p] != 0.0) {
              ++cs.spikes_in;
              cs.synapse_events += conn.fan_out;
            }
          }
        } else {
          const std::size_t c = conn.input_shape[0];
          const std::size_t h = conn.input_shape[1];
          const std::size_t w = conn.input_shape[2];
          for (std::size_t ci = 0; ci < c; ++ci) {
            for (std::size_t y = 0; y < h; ++y) {
              for (std::size_t x = 0; x < w; ++x) {
                if (step[(ci * h + y) * w + x] == 0.0) continue;
                ++cs.spikes_in;
                cs.synapse_events +=
                    conn.cover_y[y] * conn.cover_x[x] * conn.filters;
              }
            }
          }
        }
      }
    }

    if (i < forward.layers.size()) {
      const Tensor& own = forward.layers[i].train;
      for (std::size_t p = 0; p < own.size(); ++p) {
        if (own[p] != 0.0) ++cs.spikes_out;
      }
    } else if (forward.head_train.size() > 0) {
      for (std::size_t p = 0; p < forward.head_train.size(); ++p) {
        if (forward.head_train[p] != 0.0) ++cs.spikes_out;
      }
    }
    stats.connections.push_back(std::move(cs));
  }
  return stats;
}

OpCount count_ann_ops(const NetworkSpec& spec) {
  OpCount ops;
  for (const ConnectionLayout& conn : enumerate_connections(spec)) {
    ops.macs += conn.structural_ops;
  }
  return ops;
}

OpCount count_snn_ops_static(const NetworkSpec& spec, std::size_t time_steps) {
  if (time_steps < 1) {
    throw std::invalid_argument("count_snn_ops_static: time_steps must be >= 1");
  }
  OpCount ops;
  for (const ConnectionLayout& conn : enumerate_connections(spec)) {
    if (conn.input_binary) {
      ops.acs += conn.structural_ops * time_steps;
    } else {
      ops.macs += conn.structural_ops * time_steps;
    }
    ops.bias_acs += conn.bias_adds * time_steps;
  }
  return ops;
}

OpCount count_snn_ops_activity(const SpikeStats& stats) {
  OpCount ops;
  for (const ConnectionStats& conn : stats.connections) {
    if (conn.input_binary) {
      ops.acs += conn.synapse_events;
    } else {
      ops.macs += conn.structural_ops_per_step * stats.time_steps;
    }
    ops.bias_acs += conn.bias_adds_per_step * stats.time_steps;
  }
  return ops;
}

double energy_per_op_model(const OpCount& ops, const EnergyModel& model) {
  return static_cast<double>(ops.macs) * model.mac_energy_j +
         static_cast<double>(ops.acs + ops.bias_acs) * model.ac_energy_j;
}

double energy_chip_model(std::uint64_t flops, const EnergyModel& model) {
  return static_cast<double>(flops) / model.chip_flops_per_watt;
}

namespace {
double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace

EnergyReport build_report(const OpCount& ann, const OpCount& snn_static,
                          const OpCount& snn_activity, const EnergyModel& model,
                          std::size_t time_steps) {
  if (!(model.mac_energy_j > 0.0) || !(model.ac_energy_j > 0.0) ||
      !(model.chip_flops_per_watt > 0.0) || !(model.timestep_seconds > 0.0)) {
    throw std::invalid_argument("build_report: energy-model constants must be "
                                "positive");
  }
  EnergyReport report;
  report.time_steps = time_steps;
  report.ann = ann;
  report.snn_static = snn_static;
  report.snn_activity = snn_activity;
  report.model = model;

  report.ann_energy_per_op = energy_per_op_model(ann, model);
  report.snn_static_energy_per_op = energy_per_op_model(snn_static, model);
  report.snn_activity_energy_per_op = energy_per_op_model(snn_activity, model);
  report.ann_energy_chip = energy_chip_model(ann.flops(), model);
  report.snn_static_energy_chip = energy_chip_model(snn_static.flops(), model);
  report.snn_activity_energy_chip =
      energy_chip_model(snn_activity.flops(), model);

  report.ratio_per_op_static =
      safe_ratio(report.ann_energy_per_op, report.snn_static_energy_per_op);
  report.ratio_per_op_activity =
      safe_ratio(report.ann_energy_per_op, report.snn_activity_energy_per_op);
  report.ratio_chip_static =
      safe_ratio(report.ann_energy_chip, report.snn_static_energy_chip);
  report.ratio_chip_activity =
      safe_ratio(report.ann_energy_chip, report.snn_activity_energy_chip);

  report.note =
      "per-op and chip costings use different units of work and are not "
      "expected to agree in absolute terms; all inputs are echoed above";
  return report;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_kv(std::ostringstream& out, const std::string& key,
               const std::string& value) {
  out << key << " = " << value << "\n";
}

void append_ops(std::ostringstream& out, const std::string& prefix,
                const OpCount& ops) {
  append_kv(out, prefix + ".macs", std::to_string(ops.macs));
  append_kv(out, prefix + ".acs", std::to_string(ops.acs));
  append_kv(out, prefix + ".bias_acs", std::to_string(ops.bias_acs));
  append_kv(out, prefix + ".flops", std::to_string(ops.flops()));
}

}  // namespace

std::string EnergyReport::to_text() const {
  std::ostringstream out;
  append_kv(out, "time_steps", std::to_string(time_steps));
  append_kv(out, "flop_convention", OpCount::flop_convention());
  append_kv(out, "model.mac_energy_j", format_double(model.mac_energy_j));
  append_kv(out, "model.ac_energy_j", format_double(model.ac_energy_j));
  append_kv(out, "model.chip_flops_per_watt",
            format_double(model.chip_flops_per_watt));
  append_kv(out, "model.timestep_seconds",
            format_double(model.timestep_seconds));
  append_ops(out, "ann", ann);
  append_ops(out, "snn_static", snn_static);
  append_ops(out, "snn_activity", snn_activity);
  append_kv(out, "per_op.ann_energy_j", format_double(ann_energy_per_op));
  append_kv(out, "per_op.snn_static_energy_j",
            format_double(snn_static_energy_per_op));
  append_kv(out, "per_op.snn_activity_energy_j",
            format_double(snn_activity_energy_per_op));
  append_kv(out, "per_op.ann_over_snn_static",
            format_double(ratio_per_op_static));
  append_kv(out, "per_op.ann_over_snn_activity",
            format_double(ratio_per_op_activity));
  append_kv(out, "chip.ann_energy_j", format_double(ann_energy_chip));
  append_kv(out, "chip.snn_static_energy_j",
            format_double(snn_static_energy_chip));
  append_kv(out, "chip.snn_activity_energy_j",
            format_double(snn_activity_energy_chip));
  append_kv(out, "chip.ann_over_snn_static", format_double(ratio_chip_static));
  append_kv(out, "chip.ann_over_snn_activity",
            format_double(ratio_chip_activity));
  append_kv(out, "note", note);
  return out.str();
}

std::string EnergyReport::to_csv() const {
  std::ostringstream out;
  out << "costing,network,macs,acs,bias_acs,flops,energy_joules,"
         "ann_over_this\n";
  const auto row = [&](const char* costing, const char* network,
                       const OpCount& ops, double energy, double ratio) {
    out << costing << "," << network << "," << ops.macs << "," << ops.acs
        << "," << ops.bias_acs << "," << ops.flops() << ","
        << format_double(energy) << "," << format_double(ratio) << "\n";
  };
  row("per_op", "ann", ann, ann_energy_per_op, 1.0);
  row("per_op", "snn_static", snn_static, snn_static_energy_per_op,
      ratio_per_op_static);
  row("per_op", "snn_activity", snn_activity, snn_activity_energy_per_op,
      ratio_per_op_activity);
  row("chip", "ann", ann, ann_energy_chip, 1.0);
  row("chip", "snn_static", snn_static, snn_static_energy_chip,
      ratio_chip_static);
  row("chip", "snn_activity", snn_activity, snn_activity_energy_chip,
      ratio_chip_activity);
  return out.str();
}

}  // namespace spikekit
