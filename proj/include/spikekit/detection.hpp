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

#ifndef SPIKEKIT_DETECTION_HPP
#define SPIKEKIT_DETECTION_HPP

#include <cstddef>
#include <vector>

#include "spikekit/autodiff.hpp"
#include "spikekit/data.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

/// Geometry of the grid head: S x S cells, each emitting
/// [tx, ty, tw, th, objectness, class scores...]. tx/ty are the box center's
/// offset within its cell, tw/th the box size in image-normalized units.
struct DetectionGrid {
  std::size_t grid = 3;
  std::size_t num_classes = 2;

  std::size_t cell_stride() const { return 5 + num_classes; }
  std::size_t outputs() const { return grid * grid * cell_stride(); }
  std::size_t cell_offset(std::size_t row, std::size_t col) const {
    return (row * grid + col) * cell_stride();
  }
};

struct DetectionLossWeights {
  double coord = 5.0;
  double obj = 1.0;
  double noobj = 0.5;
  double cls = 1.0;
};

struct CellTarget {
  bool has_object = false;
  double tx = 0.0, ty = 0.0, tw = 0.0, th = 0.0;
  std::size_t cls = 0;
};

/// Maps each box to the cell containing its center. Boxes outside [0,1] are
/// rejected; when two boxes land in one cell the first keeps it.
std::vector<CellTarget> assign_targets(const std::vector<Box>& boxes,
                                       const DetectionGrid& geometry);

/// Squared error on coordinates and objectness plus softmax cross-entropy on
/// the class scores of object cells; empty cells contribute
/// noobj * objectness^2.
double toy_detection_loss(const Tensor& pred, const std::vector<Box>& targets,
                          const DetectionGrid& geometry,
                          const DetectionLossWeights& weights);

/// Taped composition of the same loss.
ValueId toy_detection_loss(Tape& tape, ValueId pred,
                           const std::vector<Box>& targets,
                           const DetectionGrid& geometry,
                           const DetectionLossWeights& weights);

struct Detection {
  Box box;       // box.cls is the argmax class
  double score;  // objectness
};

/// One detection per cell, scored by objectness.
std::vector<Detection> decode_grid(const Tensor& pred,
                                   const DetectionGrid& geometry);

double iou(const Box& a, const Box& b);

/// Mean over classes (with at least one ground-truth box) of 11-point
/// interpolated average precision at the given IoU threshold.
double toy_map(const std::vector<std::vector<Detection>>& detections,
               const std::vector<std::vector<Box>>& ground_truth,
               std::size_t num_classes, double iou_threshold = 0.5);

}  // namespace spikekit

#endif  // SPIKEKIT_DETECTION_HPP
