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

#ifndef SPIKEKIT_DATA_HPP
#define SPIKEKIT_DATA_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "spikekit/rng.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

enum class TaskKind { kRegression, kDetection };

/// Axis-aligned box in normalized image coordinates: (x, y) is the top-left
/// corner, all four fields lie in [0, 1] with x + w <= 1 and y + h <= 1.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::size_t cls = 0;
};

struct SyntheticSample {
  Tensor image;            // [C, H, W], raw values in [0, 1]
  Tensor target;           // regression target vector; unset for detection
  std::vector<Box> boxes;  // ground-truth boxes (regression keeps its source box)
};

struct Dataset {
  TaskKind task = TaskKind::kRegression;
  std::size_t num_classes = 0;
  std::size_t grid = 0;
  std::vector<SyntheticSample> samples;
};

struct RegressionGenConfig {
  std::size_t channels = 1;
  std::size_t height = 8;
  std::size_t width = 8;
  double noise_level = 0.25;
};

/// Images holding one bright axis-aligned rectangle on a noise background;
/// the target vector is the rectangle's normalized box [x, y, w, h], measured
/// from the rendered pixels. Deterministic given the rng seed.
Dataset generate_synthetic_regression(Rng& rng, std::size_t n,
                                      const RegressionGenConfig& cfg);

struct DetectionGenConfig {
  std::size_t channels = 3;
  std::size_t height = 12;
  std::size_t width = 12;
  std::size_t grid = 3;
  std::size_t num_classes = 2;
  std::size_t max_objects = 2;
  double noise_level = 0.3;
};

/// 1..max_objects colored rectangles/discs on a noise background. Object
/// centers land in distinct grid cells and boxes do not overlap, so every
/// stored label is exactly the bounding box of that shape's rendered pixels.
Dataset generate_synthetic_detection(Rng& rng, std::size_t n,
                                     const DetectionGenConfig& cfg);

/// Convenience overload with default image geometry.
Dataset generate_synthetic_detection(Rng& rng, std::size_t n, std::size_t grid,
                                     std::size_t num_classes);

/// Binary dataset cache. Header: magic "SNNDS1", then little-endian 32-bit
/// integers (version, task, count, C, H, W, target_dim, num_classes, grid,
/// and per-sample box counts for detection) followed by raw little-endian
/// 32-bit floats (images, then targets or boxes).
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace spikekit

#endif  // SPIKEKIT_DATA_HPP
