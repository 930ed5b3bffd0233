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

#include "spikekit/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spikekit {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, delim)) parts.push_back(item);
  return parts;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an unsigned integer, got '" +
                      value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + value +
                      "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: " + key + " expects true/false, got '" + value +
                    "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Shape parse_shape(const std::string& key, const std::string& value) {
  Shape shape;
  for (const std::string& part : split(value, 'x')) {
    shape.push_back(parse_uint(key, trim(part)));
  }
  if (shape.size() != 1 && shape.size() != 3) {
    throw ConfigError("config: " + key + " expects N or CxHxW, got '" + value +
                      "'");
  }
  return shape;
}

std::string shape_to_config(const Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out;
}

}  // namespace

std::vector<LayerSpec> parse_layers(const std::string& text) {
  std::vector<LayerSpec> layers;
  for (const std::string& raw : split(text, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const std::vector<std::string> parts = split(item, ':');
    if (parts.empty()) throw ConfigError("config: empty layer entry");
    if (parts[0] == "dense") {
      if (parts.size() != 2) {
        throw ConfigError("config: dense layer expects dense:<units>, got '" +
                          item + "'");
      }
      layers.push_back(dense_layer(parse_uint("net.layers", parts[1])));
    } else if (parts[0] == "conv") {
      if (parts.size() < 2) {
        throw ConfigError(
            "config: conv layer expects conv:<filters>x<kernel>[:s<stride>]"
            "[:p<pad>], got '" + item + "'");
      }
      const std::vector<std::string> fk = split(parts[1], 'x');
      if (fk.size() != 2) {
        throw ConfigError("config: conv geometry expects <filters>x<kernel>, "
                          "got '" + parts[1] + "'");
      }
      LayerSpec layer = conv_layer(parse_uint("net.layers", fk[0]),
                                   parse_uint("net.layers", fk[1]));
      for (std::size_t i = 2; i < parts.size(); ++i) {
        const std::string& opt = parts[i];
        if (opt.size() < 2 || (opt[0] != 's' && opt[0] != 'p')) {
          throw ConfigError("config: conv option must be s<stride> or p<pad>, "
                            "got '" + opt + "'");
        }
        const std::uint64_t v = parse_uint("net.layers", opt.substr(1));
        if (opt[0] == 's') {
          layer.stride = v;
        } else {
          layer.padding = v;
        }
      }
      layers.push_back(layer);
    } else {
      throw ConfigError("config: unknown layer kind '" + parts[0] + "'");
    }
  }
  if (layers.empty()) {
    throw ConfigError("config: net.layers must name at least one layer");
  }
  return layers;
}

std::string layers_to_string(const std::vector<LayerSpec>& layers) {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i > 0) out += ",";
    const LayerSpec& layer = layers[i];
    if (layer.kind == LayerKind::kDense) {
      out += "dense:" + std::to_string(layer.units);
    } else {
      out += "conv:" + std::to_string(layer.filters) + "x" +
             std::to_string(layer.kernel);
      if (layer.stride != 1) out += ":s" + std::to_string(layer.stride);
      if (layer.padding != 0) out += ":p" + std::to_string(layer.padding);
    }
  }
  return out;
}

std::size_t ExperimentConfig::effective_head_outputs() const {
  if (task == TaskKind::kDetection) return detection_grid().outputs();
  return head_outputs;
}

NetworkSpec ExperimentConfig::network_spec() const {
  NetworkSpec spec;
  spec.input_shape = input_shape;
  spec.layers = layers;
  for (LayerSpec& layer : spec.layers) {
    layer.if_config.v_threshold = v_threshold;
    layer.if_config.v_init = v_init;
  }
  spec.head_outputs = effective_head_outputs();
  spec.head_bias = head_bias;
  spec.decoding = decoding;
  spec.time_steps = time_steps;
  spec.surrogate.alpha = surrogate_alpha;
  spec.head_if.v_threshold = v_threshold;
  spec.head_if.v_init = v_init;
  spec.detach_reset = detach_reset;
  return spec;
}

DetectionGrid ExperimentConfig::detection_grid() const {
  DetectionGrid g;
  g.grid = grid;
  g.num_classes = num_classes;
  return g;
}

AugmentConfig ExperimentConfig::augment_config() const {
  AugmentConfig cfg;
  cfg.flip_prob = augment_flip ? 0.5 : 0.0;
  cfg.mean = normalize_mean;
  cfg.std_dev = normalize_std;
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not 'key = value': '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "seed") {
      cfg.seed = parse_uint(key, value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "threads") {
      cfg.threads = parse_uint(key, value);
    } else if (key == "task") {
      if (value == "regression") {
        cfg.task = TaskKind::kRegression;
      } else if (value == "detection") {
        cfg.task = TaskKind::kDetection;
      } else {
        throw ConfigError("config: task must be regression or detection");
      }
    } else if (key == "net.input") {
      cfg.input_shape = parse_shape(key, value);
    } else if (key == "net.layers") {
      cfg.layers = parse_layers(value);
    } else if (key == "net.head_outputs") {
      cfg.head_outputs = parse_uint(key, value);
    } else if (key == "net.decoding") {
      if (value == "cmd") {
        cfg.decoding = DecodingMode::kCmd;
      } else if (value == "rate") {
        cfg.decoding = DecodingMode::kRate;
      } else {
        throw ConfigError("config: net.decoding must be cmd or rate");
      }
    } else if (key == "net.time_steps") {
      cfg.time_steps = parse_uint(key, value);
    } else if (key == "net.v_threshold") {
      cfg.v_threshold = parse_double(key, value);
    } else if (key == "net.v_init") {
      cfg.v_init = parse_double(key, value);
    } else if (key == "net.surrogate_alpha") {
      cfg.surrogate_alpha = parse_double(key, value);
    } else if (key == "net.head_bias") {
      cfg.head_bias = parse_bool(key, value);
    } else if (key == "net.detach_reset") {
      cfg.detach_reset = parse_bool(key, value);
    } else if (key == "train.epochs") {
      cfg.epochs = parse_uint(key, value);
    } else if (key == "train.batch_size") {
      cfg.batch_size = parse_uint(key, value);
    } else if (key == "train.base_lr") {
      cfg.base_lr = parse_double(key, value);
    } else if (key == "train.min_lr") {
      cfg.min_lr = parse_double(key, value);
    } else if (key == "train.momentum") {
      cfg.momentum = parse_double(key, value);
    } else if (key == "train.weight_decay") {
      cfg.weight_decay = parse_double(key, value);
    } else if (key == "train.augment_flip") {
      cfg.augment_flip = parse_bool(key, value);
    } else if (key == "data.train_samples") {
      cfg.train_samples = parse_uint(key, value);
    } else if (key == "data.eval_samples") {
      cfg.eval_samples = parse_uint(key, value);
    } else if (key == "data.grid") {
      cfg.grid = parse_uint(key, value);
    } else if (key == "data.num_classes") {
      cfg.num_classes = parse_uint(key, value);
    } else if (key == "data.max_objects") {
      cfg.max_objects = parse_uint(key, value);
    } else if (key == "data.noise") {
      cfg.noise = parse_double(key, value);
    } else if (key == "data.normalize_mean") {
      cfg.normalize_mean = parse_double(key, value);
    } else if (key == "data.normalize_std") {
      cfg.normalize_std = parse_double(key, value);
    } else if (key == "data.file") {
      cfg.data_file = value;
    } else if (key == "loss.coord") {
      cfg.loss_coord = parse_double(key, value);
    } else if (key == "loss.noobj") {
      cfg.loss_noobj = parse_double(key, value);
    } else if (key == "loss.class") {
      cfg.loss_class = parse_double(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  if (cfg.batch_size < 1) throw ConfigError("config: train.batch_size must be >= 1");
  if (cfg.time_steps < 1) throw ConfigError("config: net.time_steps must be >= 1");
  if (cfg.train_samples < 1 || cfg.eval_samples < 1) {
    throw ConfigError("config: data sample counts must be >= 1");
  }
  if (!(cfg.v_threshold > 0.0)) {
    throw ConfigError("config: net.v_threshold must be > 0");
  }
  if (!(cfg.surrogate_alpha > 0.0)) {
    throw ConfigError("config: net.surrogate_alpha must be > 0");
  }
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
    throw ConfigError("config: train.momentum must lie in [0, 1)");
  }
  if (cfg.weight_decay < 0.0) {
    throw ConfigError("config: train.weight_decay must be >= 0");
  }
  if (!(cfg.base_lr > 0.0)) throw ConfigError("config: train.base_lr must be > 0");
  if (cfg.min_lr < 0.0) throw ConfigError("config: train.min_lr must be >= 0");
  if (!(cfg.normalize_std > 0.0)) {
    throw ConfigError("config: data.normalize_std must be > 0");
  }
  if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (cfg.task == TaskKind::kDetection) {
    if (cfg.input_shape.size() != 3) {
      throw ConfigError("config: detection needs a CxHxW input image");
    }
    if (cfg.grid < 1) throw ConfigError("config: data.grid must be >= 1");
    if (cfg.num_classes < 1) {
      throw ConfigError("config: data.num_classes must be >= 1");
    }
  } else if (cfg.head_outputs != 4) {
    throw ConfigError("config: regression targets are boxes, so "
                      "net.head_outputs must be 4");
  }
  try {
    validate(cfg.network_spec());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "seed = " << cfg.seed << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "task = "
      << (cfg.task == TaskKind::kRegression ? "regression" : "detection")
      << "\n";
  out << "net.input = " << shape_to_config(cfg.input_shape) << "\n";
  out << "net.layers = " << layers_to_string(cfg.layers) << "\n";
  out << "net.head_outputs = " << cfg.head_outputs << "\n";
  out << "net.decoding = "
      << (cfg.decoding == DecodingMode::kCmd ? "cmd" : "rate") << "\n";
  out << "net.time_steps = " << cfg.time_steps << "\n";
  out << "net.v_threshold = " << format_double(cfg.v_threshold) << "\n";
  out << "net.v_init = " << format_double(cfg.v_init) << "\n";
  out << "net.surrogate_alpha = " << format_double(cfg.surrogate_alpha) << "\n";
  out << "net.head_bias = " << (cfg.head_bias ? "true" : "false") << "\n";
  out << "net.detach_reset = " << (cfg.detach_reset ? "true" : "false") << "\n";
  out << "train.epochs = " << cfg.epochs << "\n";
  out << "train.batch_size = " << cfg.batch_size << "\n";
  out << "train.base_lr = " << format_double(cfg.base_lr) << "\n";
  out << "train.min_lr = " << format_double(cfg.min_lr) << "\n";
  out << "train.momentum = " << format_double(cfg.momentum) << "\n";
  out << "train.weight_decay = " << format_double(cfg.weight_decay) << "\n";
  out << "train.augment_flip = " << (cfg.augment_flip ? "true" : "false")
      << "\n";
  out << "data.train_samples = " << cfg.train_samples << "\n";
  out << "data.eval_samples = " << cfg.eval_samples << "\n";
  out << "data.grid = " << cfg.grid << "\n";
  out << "data.num_classes = " << cfg.num_classes << "\n";
  out << "data.max_objects = " << cfg.max_objects << "\n";
  out << "data.noise = " << format_double(cfg.noise) << "\n";
  out << "data.normalize_mean = " << format_double(cfg.normalize_mean) << "\n";
  out << "data.normalize_std = " << format_double(cfg.normalize_std) << "\n";
  out << "data.file = " << cfg.data_file << "\n";
  out << "loss.coord = " << format_double(cfg.loss_coord) << "\n";
  out << "loss.noobj = " << format_double(cfg.loss_noobj) << "\n";
  out << "loss.class = " << format_double(cfg.loss_class) << "\n";
  return out.str();
}

}  // namespace spikekit
