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

#include "spikekit/training.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "spikekit/detection.hpp"
#include "spikekit/experiment.hpp"
#include "spikekit/rng.hpp"

using namespace spikekit;

namespace {

std::vector<Parameter> single_param(double value) {
  return {Parameter{"w", Tensor({1}, {value}), true}};
}

}  // namespace

TEST(OptimizerTest, VanillaStepWithoutMomentum) {
  std::vector<Parameter> params = single_param(1.0);
  OptimizerState state = make_optimizer_state(params, 0.0, 0.0, 0.1);
  sgd_step(params, {Tensor({1}, {0.5})}, state, 0.1);
  EXPECT_DOUBLE_EQ(params[0].value[0], 1.0 - 0.1 * 0.5);
}

TEST(OptimizerTest, ZeroGradientIsFixedPoint) {
  std::vector<Parameter> params = single_param(2.5);
  OptimizerState state = make_optimizer_state(params, 0.0, 0.0, 0.1);
  sgd_step(params, {Tensor({1})}, state, 0.1);
  EXPECT_DOUBLE_EQ(params[0].value[0], 2.5);
}

// Constant gradient g for two steps at momentum 0.9, lr 1: velocities are g
// then 1.9 g, so the total displacement is 2.9 g.
TEST(OptimizerTest, TwoStepMomentumRecurrence) {
  const double g = 0.3;
  std::vector<Parameter> params = single_param(0.0);
  OptimizerState state = make_optimizer_state(params, 0.9, 0.0, 1.0);
  sgd_step(params, {Tensor({1}, {g})}, state, 1.0);
  sgd_step(params, {Tensor({1}, {g})}, state, 1.0);
  EXPECT_NEAR(params[0].value[0], -2.9 * g, 1e-15);
}

TEST(OptimizerTest, MomentumZeroMatchesManualDescentBitwise) {
  Rng rng(4);
  std::vector<Parameter> params = {
      Parameter{"w", Tensor({8}), true},
  };
  for (std::size_t i = 0; i < 8; ++i) params[0].value[i] = rng.uniform(-1, 1);
  Tensor manual = params[0].value;
  OptimizerState state = make_optimizer_state(params, 0.0, 0.0, 0.05);
  for (int step = 0; step < 20; ++step) {
    Tensor grad({8});
    for (std::size_t i = 0; i < 8; ++i) grad[i] = rng.uniform(-1, 1);
    sgd_step(params, {grad}, state, 0.05);
    for (std::size_t i = 0; i < 8; ++i) manual[i] -= 0.05 * grad[i];
  }
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(params[0].value[i], manual[i]);
  }
}

TEST(OptimizerTest, WeightDecayOnlyTouchesFlaggedParams) {
  std::vector<Parameter> params = {
      Parameter{"w", Tensor({1}, {1.0}), true},
      Parameter{"b", Tensor({1}, {1.0}), false},
  };
  OptimizerState state = make_optimizer_state(params, 0.0, 0.01, 0.1);
  sgd_step(params, {Tensor({1}), Tensor({1})}, state, 1.0);
  EXPECT_DOUBLE_EQ(params[0].value[0], 1.0 - 0.01);  // decay applied
  EXPECT_DOUBLE_EQ(params[1].value[0], 1.0);         // bias untouched
}

TEST(OptimizerTest, RejectsMismatchedShapes) {
  std::vector<Parameter> params = single_param(0.0);
  OptimizerState state = make_optimizer_state(params, 0.0, 0.0, 0.1);
  EXPECT_THROW(sgd_step(params, {Tensor({2})}, state, 0.1),
               std::invalid_argument);
  EXPECT_THROW(make_optimizer_state(params, 1.0, 0.0, 0.1),
               std::invalid_argument);
}

TEST(ScheduleTest, CosineEndpoints) {
  EXPECT_DOUBLE_EQ(cosine_lr({0, 100, 0.1, 0.0}), 0.1);
  EXPECT_NEAR(cosine_lr({100, 100, 0.1, 0.0}), 0.0, 1e-17);
  EXPECT_NEAR(cosine_lr({50, 100, 0.1, 0.02}), (0.1 + 0.02) / 2.0, 1e-15);
}

TEST(ScheduleTest, CosineIsNonIncreasing) {
  double previous = cosine_lr({0, 64, 0.5, 0.001});
  for (std::size_t epoch = 1; epoch <= 64; ++epoch) {
    const double lr = cosine_lr({epoch, 64, 0.5, 0.001});
    EXPECT_LE(lr, previous + 1e-15);
    previous = lr;
  }
  EXPECT_THROW(cosine_lr({5, 4, 0.1, 0.0}), std::invalid_argument);
}

TEST(LossTest, MseBasics) {
  EXPECT_DOUBLE_EQ(mse_loss(Tensor({2}, {1, 0}), Tensor({2}, {1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(mse_loss(Tensor({2}, {1, 0}), Tensor({2}, {0, 0})), 0.5);
  EXPECT_THROW(mse_loss(Tensor({2}), Tensor({3})), std::invalid_argument);
}

TEST(LossTest, MseGradientIsTwoDiffOverN) {
  const Tensor pred({4}, {0.3, -0.2, 0.9, 0.0});
  const Tensor target({4}, {0.1, 0.1, 0.1, 0.1});
  Tape tape;
  const ValueId p = tape.leaf(pred);
  tape.backward(mse_loss(tape, p, target));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(tape.grad(p)[i], 2.0 * (pred[i] - target[i]) / 4.0, 1e-12);
  }
}

namespace {

SyntheticSample sample_with_box(double x, double y, double w, double h) {
  SyntheticSample sample;
  sample.image = Tensor({1, 8, 8});
  for (std::size_t i = 0; i < sample.image.size(); ++i) {
    sample.image[i] = 0.01 * static_cast<double>(i);
  }
  sample.boxes.push_back(Box{x, y, w, h, 0});
  sample.target = Tensor({4}, {x, y, w, h});
  return sample;
}

}  // namespace

TEST(AugmentTest, FlipIsInvolution) {
  const SyntheticSample sample = sample_with_box(0.1, 0.3, 0.2, 0.4);
  const SyntheticSample twice = flip_horizontal(flip_horizontal(sample));
  for (std::size_t i = 0; i < sample.image.size(); ++i) {
    EXPECT_EQ(twice.image[i], sample.image[i]);
  }
  EXPECT_DOUBLE_EQ(twice.boxes[0].x, 0.1);
  EXPECT_DOUBLE_EQ(twice.target[0], 0.1);
}

TEST(AugmentTest, CenteredBoxIsFlipFixedPoint) {
  const SyntheticSample sample = sample_with_box(0.4, 0.2, 0.2, 0.3);
  const SyntheticSample flipped = flip_horizontal(sample);
  EXPECT_NEAR(flipped.boxes[0].x, 0.4, 1e-15);
}

TEST(AugmentTest, FlipRemapsBoxX) {
  const SyntheticSample sample = sample_with_box(0.1, 0.0, 0.2, 0.5);
  const SyntheticSample flipped = flip_horizontal(sample);
  EXPECT_NEAR(flipped.boxes[0].x, 0.7, 1e-15);
  EXPECT_NEAR(flipped.target[0], 0.7, 1e-15);
}

TEST(AugmentTest, NormalizationAlwaysApplied) {
  const SyntheticSample sample = sample_with_box(0.25, 0.25, 0.25, 0.25);
  Rng rng(5);
  const AugmentConfig cfg{0.0, 0.5, 0.5};
  const SyntheticSample out = augment(sample, rng, cfg);
  for (std::size_t i = 0; i < sample.image.size(); ++i) {
    EXPECT_NEAR(out.image[i], (sample.image[i] - 0.5) / 0.5, 1e-15);
  }
}

// The flipped rendering must agree with the flipped label: re-measure the
// bright pixels of a flipped regression image.
TEST(AugmentTest, FlipIsLabelConsistent) {
  Rng rng(77);
  RegressionGenConfig cfg;
  const Dataset ds = generate_synthetic_regression(rng, 20, cfg);
  for (const SyntheticSample& sample : ds.samples) {
    const SyntheticSample flipped = flip_horizontal(sample);
    std::size_t min_x = cfg.width, max_x = 0, min_y = cfg.height, max_y = 0;
    for (std::size_t yy = 0; yy < cfg.height; ++yy) {
      for (std::size_t xx = 0; xx < cfg.width; ++xx) {
        if (flipped.image.at(0, yy, xx) >= 0.5) {
          min_x = std::min(min_x, xx);
          max_x = std::max(max_x, xx);
          min_y = std::min(min_y, yy);
          max_y = std::max(max_y, yy);
        }
      }
    }
    const double px = 1.0 / static_cast<double>(cfg.width);
    EXPECT_LE(std::abs(flipped.target[0] - min_x * px), px + 1e-12);
    EXPECT_LE(std::abs((flipped.target[0] + flipped.target[2]) -
                       (max_x + 1) * px),
              px + 1e-12);
  }
}

namespace {

DetectionGrid toy_grid() { return DetectionGrid{2, 2}; }

// Prediction grid that matches `targets` exactly, with saturated class
// logits and objectness 1/0.
Tensor perfect_prediction(const std::vector<Box>& boxes,
                          const DetectionGrid& geometry) {
  Tensor pred({geometry.outputs()});
  const std::vector<CellTarget> cells = assign_targets(boxes, geometry);
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    const std::size_t base = cell * geometry.cell_stride();
    if (!cells[cell].has_object) continue;
    pred[base + 0] = cells[cell].tx;
    pred[base + 1] = cells[cell].ty;
    pred[base + 2] = cells[cell].tw;
    pred[base + 3] = cells[cell].th;
    pred[base + 4] = 1.0;
    for (std::size_t c = 0; c < geometry.num_classes; ++c) {
      pred[base + 5 + c] = c == cells[cell].cls ? 40.0 : -40.0;
    }
  }
  return pred;
}

}  // namespace

TEST(DetectionLossTest, PerfectPredictionLossIsZero) {
  const DetectionGrid geometry = toy_grid();
  const std::vector<Box> boxes = {Box{0.1, 0.1, 0.2, 0.2, 1},
                                  Box{0.6, 0.6, 0.3, 0.3, 0}};
  const Tensor pred = perfect_prediction(boxes, geometry);
  const double loss =
      toy_detection_loss(pred, boxes, geometry, DetectionLossWeights{});
  EXPECT_LE(loss, 1e-12);
}

TEST(DetectionLossTest, EmptyImageZeroObjectnessIsZeroLoss) {
  const DetectionGrid geometry = toy_grid();
  const Tensor pred({geometry.outputs()});
  EXPECT_DOUBLE_EQ(
      toy_detection_loss(pred, {}, geometry, DetectionLossWeights{}), 0.0);
}

TEST(DetectionLossTest, SingleBoxHandComputed) {
  DetectionGrid geometry{2, 2};
  DetectionLossWeights weights;
  weights.coord = 5.0;
  weights.obj = 1.0;
  weights.noobj = 0.5;
  weights.cls = 1.0;
  // Box centered at (0.25, 0.25) -> cell (0,0), tx = ty = 0.5.
  const std::vector<Box> boxes = {Box{0.15, 0.15, 0.2, 0.2, 1}};
  Tensor pred({geometry.outputs()});
  const std::size_t base = 0;
  pred[base + 0] = 0.4;   // tx err 0.1
  pred[base + 1] = 0.6;   // ty err 0.1
  pred[base + 2] = 0.25;  // tw err 0.05
  pred[base + 3] = 0.15;  // th err 0.05
  pred[base + 4] = 0.8;   // obj err 0.2
  pred[base + 5] = 0.3;   // class logits
  pred[base + 6] = -0.2;
  // Empty cells carry some objectness to penalize.
  pred[geometry.cell_offset(0, 1) + 4] = 0.1;
  pred[geometry.cell_offset(1, 0) + 4] = -0.2;
  pred[geometry.cell_offset(1, 1) + 4] = 0.0;

  const double coord_term =
      5.0 * (0.1 * 0.1 + 0.1 * 0.1 + 0.05 * 0.05 + 0.05 * 0.05);
  const double obj_term = 1.0 * 0.2 * 0.2;
  const double noobj_term = 0.5 * (0.1 * 0.1 + 0.2 * 0.2);
  // Softmax cross-entropy for logits [0.3, -0.2], target class 1.
  const double ce =
      std::log(std::exp(0.3) + std::exp(-0.2)) - (-0.2);
  const double expected = coord_term + obj_term + noobj_term + ce;
  EXPECT_NEAR(toy_detection_loss(pred, boxes, geometry, weights), expected,
              1e-12);
}

TEST(DetectionLossTest, RejectsOutOfRangeBox) {
  const DetectionGrid geometry = toy_grid();
  const Tensor pred({geometry.outputs()});
  EXPECT_THROW(toy_detection_loss(pred, {Box{0.9, 0.1, 0.3, 0.2, 0}}, geometry,
                                  DetectionLossWeights{}),
               std::invalid_argument);
  EXPECT_THROW(toy_detection_loss(pred, {Box{0.1, 0.1, 0.2, 0.2, 5}}, geometry,
                                  DetectionLossWeights{}),
               std::invalid_argument);
}

TEST(DetectionLossTest, TapedLossMatchesPlainLoss) {
  Rng rng(6);
  const DetectionGrid geometry{3, 2};
  const std::vector<Box> boxes = {Box{0.05, 0.1, 0.25, 0.3, 0},
                                  Box{0.55, 0.6, 0.3, 0.25, 1}};
  DetectionLossWeights weights;
  for (int round = 0; round < 5; ++round) {
    Tensor pred({geometry.outputs()});
    for (std::size_t i = 0; i < pred.size(); ++i) {
      pred[i] = rng.uniform(-1, 1);
    }
    Tape tape;
    const ValueId p = tape.leaf(pred);
    const ValueId loss = toy_detection_loss(tape, p, boxes, geometry, weights);
    EXPECT_NEAR(tape.value(loss)[0],
                toy_detection_loss(pred, boxes, geometry, weights), 1e-12);
  }
}

TEST(DetectionLossTest, TapedLossGradientMatchesFiniteDifferences) {
  Rng rng(7);
  const DetectionGrid geometry{2, 2};
  const std::vector<Box> boxes = {Box{0.1, 0.15, 0.3, 0.25, 1}};
  DetectionLossWeights weights;
  Tensor pred({geometry.outputs()});
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = rng.uniform(-1, 1);

  Tape tape;
  const ValueId p = tape.leaf(pred);
  tape.backward(toy_detection_loss(tape, p, boxes, geometry, weights));
  const Tensor grad = tape.grad(p);

  const double h = 1e-6;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    Tensor up = pred;
    up[i] += h;
    Tensor down = pred;
    down[i] -= h;
    const double fd = (toy_detection_loss(up, boxes, geometry, weights) -
                       toy_detection_loss(down, boxes, geometry, weights)) /
                      (2.0 * h);
    EXPECT_NEAR(grad[i], fd, 1e-5);
  }
}

TEST(DetectionMetricTest, IoUBasics) {
  const Box a{0.0, 0.0, 0.5, 0.5, 0};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, Box{0.5, 0.5, 0.4, 0.4, 0}), 0.0);
  const Box b{0.25, 0.0, 0.5, 0.5, 0};
  EXPECT_NEAR(iou(a, b), 0.125 / 0.375, 1e-12);
}

TEST(DetectionMetricTest, PerfectDetectionsGiveFullMap) {
  std::vector<std::vector<Box>> gt = {
      {Box{0.1, 0.1, 0.2, 0.2, 0}, Box{0.6, 0.6, 0.3, 0.3, 1}},
      {Box{0.4, 0.2, 0.25, 0.25, 0}},
  };
  std::vector<std::vector<Detection>> dets(2);
  for (std::size_t img = 0; img < 2; ++img) {
    for (const Box& box : gt[img]) {
      dets[img].push_back(Detection{box, 0.9});
    }
  }
  EXPECT_NEAR(toy_map(dets, gt, 2), 1.0, 1e-12);
}

TEST(DetectionMetricTest, MissedClassLowersMap) {
  std::vector<std::vector<Box>> gt = {
      {Box{0.1, 0.1, 0.2, 0.2, 0}, Box{0.6, 0.6, 0.3, 0.3, 1}},
  };
  // Only the class-0 object is found.
  std::vector<std::vector<Detection>> dets = {
      {Detection{Box{0.1, 0.1, 0.2, 0.2, 0}, 0.9}},
  };
  EXPECT_NEAR(toy_map(dets, gt, 2), 0.5, 1e-12);
}

// Short regression run: trained loss must drop below the initial loss.
TEST(TrainingLoopTest, TrainingDecreasesLoss) {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.epochs = 6;
  cfg.train_samples = 64;
  cfg.eval_samples = 32;
  cfg.layers = {dense_layer(24), dense_layer(16)};
  const TrainResult result = run_train(cfg, std::filesystem::temp_directory_path() /
                                                "spikekit_train_smoke");
  ASSERT_EQ(result.exit_code, 0);
  ASSERT_FALSE(result.rows.empty());
  EXPECT_LT(result.rows.back().eval_metric, result.initial_eval);
}
