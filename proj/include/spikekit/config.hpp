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

#ifndef SPIKEKIT_CONFIG_HPP
#define SPIKEKIT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikekit/data.hpp"
#include "spikekit/detection.hpp"
#include "spikekit/network.hpp"
#include "spikekit/training.hpp"

namespace spikekit {

/// Raised for malformed or inconsistent configuration; the CLI maps it to
/// exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs, expressed as flat `key = value` text with dotted
/// section prefixes. Every field has a default; a fully-defaulted config
/// trains the synthetic regression task end to end. The seed fully
/// determines a single-threaded run.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::size_t threads = 1;
  TaskKind task = TaskKind::kRegression;

  // net.*
  Shape input_shape = {1, 8, 8};
  std::vector<LayerSpec> layers = {dense_layer(48), dense_layer(32)};
  std::size_t head_outputs = 4;
  DecodingMode decoding = DecodingMode::kCmd;
  std::size_t time_steps = 4;
  double v_threshold = 1.0;
  double v_init = 0.0;
  double surrogate_alpha = 2.0;
  bool head_bias = true;
  bool detach_reset = false;

  // train.*
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  double base_lr = 0.1;
  double min_lr = 0.0;
  double momentum = 0.9;
  double weight_decay = 5e-3;
  bool augment_flip = true;

  // data.*
  std::size_t train_samples = 256;
  std::size_t eval_samples = 64;
  std::size_t grid = 3;
  std::size_t num_classes = 2;
  std::size_t max_objects = 2;
  double noise = 0.25;
  double normalize_mean = 0.5;
  double normalize_std = 0.5;
  std::string data_file;  // optional dataset cache prefix; empty = generate

  // loss.* (detection)
  double loss_coord = 5.0;
  double loss_noobj = 0.5;
  double loss_class = 1.0;

  /// Head width implied by the task: the regression target dimension, or
  /// grid^2 * (5 + classes) for detection.
  std::size_t effective_head_outputs() const;
  NetworkSpec network_spec() const;
  DetectionGrid detection_grid() const;
  AugmentConfig augment_config() const;
};

/// Parses the flat key = value format. Unknown keys, bad values, and
/// inconsistent settings raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical serialization: every key, fixed order. parse(serialize(c))
/// reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);

std::string layers_to_string(const std::vector<LayerSpec>& layers);
std::vector<LayerSpec> parse_layers(const std::string& text);

}  // namespace spikekit

#endif  // SPIKEKIT_CONFIG_HPP
