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

#include "spikekit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spikekit {

namespace {

void check_pred_shape(const Tensor& pred, const DetectionGrid& geometry) {
  if (pred.rank() != 1 || pred.size() != geometry.outputs()) {
    throw std::invalid_argument(
        "detection: prediction must be a vector of length " +
        std::to_string(geometry.outputs()) + ", got " +
        shape_to_string(pred.shape()));
  }
}

double softmax_ce(const std::vector<double>& logits, std::size_t target) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double exp_sum = 0.0;
  for (double l : logits) exp_sum += std::exp(l - m);
  return m + std::log(exp_sum) - logits[target];
}

}  // namespace

std::vector<CellTarget> assign_targets(const std::vector<Box>& boxes,
                                       const DetectionGrid& geometry) {
  std::vector<CellTarget> cells(geometry.grid * geometry.grid);
  for (const Box& box : boxes) {
    if (box.x < 0.0 || box.y < 0.0 || box.w <= 0.0 || box.h <= 0.0 ||
        box.x + box.w > 1.0 + 1e-12 || box.y + box.h > 1.0 + 1e-12) {
      throw std::invalid_argument("detection: target box outside [0,1]");
    }
    if (box.cls >= geometry.num_classes) {
      throw std::invalid_argument("detection: class index " +
                                  std::to_string(box.cls) +
                                  " out of range for " +
                                  std::to_string(geometry.num_classes));
    }
    const double cx = box.x + box.w / 2.0;
    const double cy = box.y + box.h / 2.0;
    const auto col = std::min<std::size_t>(
        geometry.grid - 1, static_cast<std::size_t>(cx * geometry.grid));
    const auto row = std::min<std::size_t>(
        geometry.grid - 1, static_cast<std::size_t>(cy * geometry.grid));
    CellTarget& cell = cells[row * geometry.grid + col];
    if (cell.has_object) continue;  // first box keeps a contested cell
    cell.has_object = true;
    cell.tx = cx * geometry.grid - static_cast<double>(col);
    cell.ty = cy * geometry.grid - static_cast<double>(row);
    cell.tw = box.w;
    cell.th = box.h;
    cell.cls = box.cls;
  }
  return cells;
}

double toy_detection_loss(const Tensor& pred, const std::vector<Box>& targets,
                          const DetectionGrid& geometry,
                          const DetectionLossWeights& weights) {
  check_pred_shape(pred, geometry);
  const std::vector<CellTarget> cells = assign_targets(targets, geometry);
  double loss = 0.0;
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    const std::size_t base = cell * geometry.cell_stride();
    const CellTarget& t = cells[cell];
    const double obj_pred = pred[base + 4];
    if (!t.has_object) {
      loss += weights.noobj * obj_pred * obj_pred;
      continue;
    }
    const double dx = pred[base + 0] - t.tx;
    const double dy = pred[base + 1] - t.ty;
    const double dw = pred[base + 2] - t.tw;
    const double dh = pred[base + 3] - t.th;
    loss += weights.coord * (dx * dx + dy * dy + dw * dw + dh * dh);
    const double dobj = obj_pred - 1.0;
    loss += weights.obj * dobj * dobj;
    std::vector<double> logits(geometry.num_classes);
    for (std::size_t c = 0; c < geometry.num_classes; ++c) {
      logits[c] = pred[base + 5 + c];
    }
    loss += weights.cls * softmax_ce(logits, t.cls);
  }
  return loss;
}

ValueId toy_detection_loss(Tape& tape, ValueId pred,
                           const std::vector<Box>& targets,
                           const DetectionGrid& geometry,
                           const DetectionLossWeights& weights) {
  check_pred_shape(tape.value(pred), geometry);
  const std::vector<CellTarget> cells = assign_targets(targets, geometry);

  // Squared-error slots gathered across all cells at once: coordinates and
  // objectness of object cells, objectness of empty cells.
  std::vector<std::size_t> indices;
  std::vector<double> target_values;
  std::vector<double> term_weights;
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    const std::size_t base = cell * geometry.cell_stride();
    const CellTarget& t = cells[cell];
    if (t.has_object) {
      const double coords[4] = {t.tx, t.ty, t.tw, t.th};
      for (std::size_t k = 0; k < 4; ++k) {
        indices.push_back(base + k);
        target_values.push_back(coords[k]);
        term_weights.push_back(weights.coord);
      }
      indices.push_back(base + 4);
      target_values.push_back(1.0);
      term_weights.push_back(weights.obj);
    } else {
      indices.push_back(base + 4);
      target_values.push_back(0.0);
      term_weights.push_back(weights.noobj);
    }
  }

  const ValueId picked = tape.gather(pred, indices);
  const ValueId target_id =
      tape.leaf(Tensor({target_values.size()}, target_values));
  const ValueId diff = tape.sub(picked, target_id);
  const ValueId weighted = tape.mul(
      tape.mul(diff, diff),
      tape.leaf(Tensor({term_weights.size()}, term_weights)));
  ValueId loss = tape.sum(weighted);

  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    const CellTarget& t = cells[cell];
    if (!t.has_object) continue;
    const std::size_t base = cell * geometry.cell_stride();
    std::vector<std::size_t> class_idx(geometry.num_classes);
    for (std::size_t c = 0; c < geometry.num_classes; ++c) {
      class_idx[c] = base + 5 + c;
    }
    const ValueId logits = tape.gather(pred, class_idx);
    const ValueId ce = tape.softmax_cross_entropy(logits, t.cls);
    loss = tape.add(loss, tape.scale(ce, weights.cls));
  }
  return loss;
}

std::vector<Detection> decode_grid(const Tensor& pred,
                                   const DetectionGrid& geometry) {
  check_pred_shape(pred, geometry);
  std::vector<Detection> out;
  out.reserve(geometry.grid * geometry.grid);
  for (std::size_t row = 0; row < geometry.grid; ++row) {
    for (std::size_t col = 0; col < geometry.grid; ++col) {
      const std::size_t base = geometry.cell_offset(row, col);
      const double cx = (static_cast<double>(col) + pred[base + 0]) /
                        static_cast<double>(geometry.grid);
      const double cy = (static_cast<double>(row) + pred[base + 1]) /
                        static_cast<double>(geometry.grid);
      const double w = pred[base + 2];
      const double h = pred[base + 3];
      Detection det;
      det.box.x = cx - w / 2.0;
      det.box.y = cy - h / 2.0;
      det.box.w = w;
      det.box.h = h;
      det.score = pred[base + 4];
      std::size_t best = 0;
      for (std::size_t c = 1; c < geometry.num_classes; ++c) {
        if (pred[base + 5 + c] > pred[base + 5 + best]) best = c;
      }
      det.box.cls = best;
      out.push_back(det);
    }
  }
  return out;
}

double iou(const Box& a, const Box& b) {
  const double ix = std::max(a.x, b.x);
  const double iy = std::max(a.y, b.y);
  const double ix2 = std::min(a.x + a.w, b.x + b.w);
  const double iy2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = std::max(0.0, ix2 - ix);
  const double ih = std::max(0.0, iy2 - iy);
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double toy_map(const std::vector<std::vector<Detection>>& detections,
               const std::vector<std::vector<Box>>& ground_truth,
               std::size_t num_classes, double iou_threshold) {
  if (detections.size() != ground_truth.size()) {
    throw std::invalid_argument("toy_map: detections and ground truth must "
                                "cover the same images");
  }
  double ap_sum = 0.0;
  std::size_t classes_with_gt = 0;

  for (std::size_t cls = 0; cls < num_classes; ++cls) {
    std::size_t gt_total = 0;
    for (const auto& boxes : ground_truth) {
      for (const Box& b : boxes) {
        if (b.cls == cls) ++gt_total;
      }
    }
    if (gt_total == 0) continue;
    ++classes_with_gt;

    struct Scored {
      double score;
      std::size_t image;
      Box box;
    };
    std::vector<Scored> scored;
    for (std::size_t img = 0; img < detections.size(); ++img) {
      for (const Detection& det : detections[img]) {
        if (det.box.cls == cls) scored.push_back({det.score, img, det.box});
      }
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) {
                       return a.score > b.score;
                     });

    std::vector<std::vector<bool>> matched(ground_truth.size());
    for (std::size_t img = 0; img < ground_truth.size(); ++img) {
      matched[img].assign(ground_truth[img].size(), false);
    }

    std::vector<double> precision;
    std::vector<double> recall;
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const Scored& s : scored) {
      double best_iou = 0.0;
      std::size_t best_gt = 0;
      bool found = false;
      const auto& gts = ground_truth[s.image];
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gts[g].cls != cls || matched[s.image][g]) continue;
        const double overlap = iou(s.box, gts[g]);
        if (overlap > best_iou) {
          best_iou = overlap;
          best_gt = g;
          found = true;
        }
      }
      if (found && best_iou >= iou_threshold) {
        matched[s.image][best_gt] = true;
        ++tp;
      } else {
        ++fp;
      }
      precision.push_back(static_cast<double>(tp) /
                          static_cast<double>(tp + fp));
      recall.push_back(static_cast<double>(tp) / static_cast<double>(gt_total));
    }

    double ap = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double r = static_cast<double>(i) / 10.0;
      double p_max = 0.0;
      for (std::size_t k = 0; k < recall.size(); ++k) {
        if (recall[k] >= r) p_max = std::max(p_max, precision[k]);
      }
      ap += p_max;
    }
    ap_sum += ap / 11.0;
  }
  if (classes_with_gt == 0) return 0.0;
  return ap_sum / static_cast<double>(classes_with_gt);
}

}  // namespace spikekit
