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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spikekit/checkpoint.hpp"
#include "spikekit/config.hpp"
#include "spikekit/experiment.hpp"
#include "spikekit/rng.hpp"

using namespace spikekit;

namespace {

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(ConfigTest, DefaultsRoundTrip) {
  const ExperimentConfig defaults;
  const std::string text = serialize_config(defaults);
  const ExperimentConfig parsed = parse_config(text);
  EXPECT_EQ(serialize_config(parsed), text);
}

TEST(ConfigTest, FullRoundTripWithOverrides) {
  const std::string text =
      "# toy detection setup\n"
      "seed = 42\n"
      "task = detection\n"
      "net.input = 3x12x12\n"
      "net.layers = conv:8x3:p1, conv:12x2:s2, dense:64\n"
      "net.decoding = rate\n"
      "net.time_steps = 6\n"
      "net.surrogate_alpha = 3.5\n"
      "train.epochs = 7\n"
      "train.weight_decay = 0.005\n"
      "data.grid = 3\n"
      "data.num_classes = 2\n";
  const ExperimentConfig cfg = parse_config(text);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.task, TaskKind::kDetection);
  ASSERT_EQ(cfg.layers.size(), 3u);
  EXPECT_EQ(cfg.layers[0].kind, LayerKind::kConv2d);
  EXPECT_EQ(cfg.layers[0].padding, 1u);
  EXPECT_EQ(cfg.layers[1].stride, 2u);
  EXPECT_EQ(cfg.layers[2].units, 64u);
  EXPECT_EQ(cfg.decoding, DecodingMode::kRate);
  // Canonical echo parses back to the same canonical echo.
  const std::string canon = serialize_config(cfg);
  EXPECT_EQ(serialize_config(parse_config(canon)), canon);
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("bogus.key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("net.time_steps = zero\n"), ConfigError);
  EXPECT_THROW(parse_config("net.decoding = spikes\n"), ConfigError);
  EXPECT_THROW(parse_config("train.momentum = 1.0\n"), ConfigError);
  EXPECT_THROW(parse_config("net.layers = pool:2\n"), ConfigError);
  EXPECT_THROW(parse_config("just a line\n"), ConfigError);
  EXPECT_THROW(parse_config("net.head_outputs = 7\n"), ConfigError);
}

TEST(ConfigTest, DetectionHeadWidthFollowsGrid) {
  ExperimentConfig cfg;
  cfg.task = TaskKind::kDetection;
  cfg.grid = 3;
  cfg.num_classes = 2;
  EXPECT_EQ(cfg.effective_head_outputs(), 9u * 7u);
  EXPECT_EQ(cfg.network_spec().head_outputs, 63u);
}

TEST(CheckpointTest, SaveLoadSaveIsByteIdentical) {
  const auto dir = temp_dir("spikekit_ckpt");
  ExperimentConfig cfg;
  cfg.seed = 7;
  Network net = make_network(cfg);
  OptimizerState opt =
      make_optimizer_state(net.params(), cfg.momentum, cfg.weight_decay, 0.1);

  Checkpoint ckpt;
  ckpt.config_echo = serialize_config(cfg);
  ckpt.epoch = 3;
  ckpt.params = net.params();
  ckpt.velocity = opt.velocity;
  Rng shuffle(1);
  Rng augmenter(2);
  shuffle.raw();
  ckpt.rng_shuffle_state = shuffle.save_state();
  ckpt.rng_augment_state = augmenter.save_state();

  const auto path_a = dir / "a.bin";
  const auto path_b = dir / "b.bin";
  save_checkpoint(ckpt, path_a);
  const Checkpoint loaded = load_checkpoint(path_a);
  save_checkpoint(loaded, path_b);
  EXPECT_EQ(file_bytes(path_a), file_bytes(path_b));
  EXPECT_EQ(loaded.epoch, 3u);
  ASSERT_EQ(loaded.params.size(), net.params().size());
  EXPECT_EQ(loaded.params[0].name, net.params()[0].name);
}

TEST(CheckpointTest, LoadedParametersReproduceForwardBitExactly) {
  const auto dir = temp_dir("spikekit_ckpt_fw");
  ExperimentConfig cfg;
  cfg.seed = 11;
  Network net = make_network(cfg);
  Checkpoint ckpt;
  ckpt.config_echo = serialize_config(cfg);
  ckpt.params = net.params();
  OptimizerState opt =
      make_optimizer_state(net.params(), cfg.momentum, cfg.weight_decay, 0.1);
  ckpt.velocity = opt.velocity;
  const auto path = dir / "ckpt.bin";
  save_checkpoint(ckpt, path);

  const Network restored = network_from_checkpoint(cfg, load_checkpoint(path));
  Rng rng(5);
  Tensor image(cfg.input_shape);
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = rng.uniform(0, 1);
  const Tensor a = net.forward(image).output;
  const Tensor b = restored.forward(image).output;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(CheckpointTest, MismatchedNetworkIsRejected) {
  const auto dir = temp_dir("spikekit_ckpt_bad");
  ExperimentConfig cfg;
  Network net = make_network(cfg);
  Checkpoint ckpt;
  ckpt.config_echo = serialize_config(cfg);
  ckpt.params = net.params();
  ckpt.params.pop_back();
  const auto path = dir / "ckpt.bin";
  save_checkpoint(ckpt, path);
  EXPECT_THROW(network_from_checkpoint(cfg, load_checkpoint(path)),
               std::runtime_error);
}

TEST(TrainRunTest, ZeroEpochRunWritesHeaderAndInitCheckpoint) {
  const auto dir = temp_dir("spikekit_zero_epochs");
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.epochs = 0;
  cfg.train_samples = 8;
  cfg.eval_samples = 4;
  const TrainResult result = run_train(cfg, dir);
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_TRUE(result.rows.empty());
  EXPECT_EQ(file_bytes(result.metrics_csv),
            "epoch,train_loss,eval_metric,learning_rate,"
            "avg_spikes_per_sample\n");

  const Checkpoint ckpt = load_checkpoint(result.checkpoint_path);
  EXPECT_EQ(ckpt.epoch, 0u);
  const Network fresh = make_network(cfg);
  ASSERT_EQ(ckpt.params.size(), fresh.params().size());
  for (std::size_t p = 0; p < ckpt.params.size(); ++p) {
    for (std::size_t i = 0; i < ckpt.params[p].value.size(); ++i) {
      EXPECT_EQ(ckpt.params[p].value[i], fresh.params()[p].value[i]);
    }
  }
}

TEST(TrainRunTest, IdenticalSeedsGiveByteIdenticalOutputs) {
  const auto dir_a = temp_dir("spikekit_repro_a");
  const auto dir_b = temp_dir("spikekit_repro_b");
  ExperimentConfig cfg;
  cfg.seed = 123;
  cfg.epochs = 3;
  cfg.train_samples = 24;
  cfg.eval_samples = 8;
  cfg.layers = {dense_layer(12), dense_layer(8)};
  const TrainResult a = run_train(cfg, dir_a);
  const TrainResult b = run_train(cfg, dir_b);
  ASSERT_EQ(a.exit_code, 0);
  ASSERT_EQ(b.exit_code, 0);
  EXPECT_EQ(file_bytes(a.metrics_csv), file_bytes(b.metrics_csv));
  EXPECT_EQ(file_bytes(a.checkpoint_path), file_bytes(b.checkpoint_path));
}

TEST(TrainRunTest, ThreadCountDoesNotChangeResults) {
  const auto dir_a = temp_dir("spikekit_thr_a");
  const auto dir_b = temp_dir("spikekit_thr_b");
  ExperimentConfig cfg;
  cfg.seed = 9;
  cfg.epochs = 2;
  cfg.train_samples = 16;
  cfg.eval_samples = 8;
  cfg.layers = {dense_layer(10)};
  const TrainResult a = run_train(cfg, dir_a);
  cfg.threads = 4;
  const TrainResult b = run_train(cfg, dir_b);
  EXPECT_EQ(file_bytes(a.metrics_csv), file_bytes(b.metrics_csv));
}

TEST(TrainRunTest, NonFiniteLossAbortsWithLastGoodCheckpoint) {
  const auto dir = temp_dir("spikekit_nan");
  ExperimentConfig cfg;
  cfg.seed = 2;
  cfg.epochs = 60;
  cfg.train_samples = 8;
  cfg.eval_samples = 4;
  cfg.base_lr = 1e18;  // guaranteed blow-up
  cfg.min_lr = 1e18;
  const TrainResult result = run_train(cfg, dir);
  EXPECT_EQ(result.exit_code, 2);
  EXPECT_TRUE(std::filesystem::exists(result.checkpoint_path));
  const Checkpoint ckpt = load_checkpoint(result.checkpoint_path);
  for (const Parameter& p : ckpt.params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      EXPECT_TRUE(std::isfinite(p.value[i]));
    }
  }
}

TEST(TrainRunTest, EvalSubcommandReproducesFinalLoggedMetric) {
  const auto dir = temp_dir("spikekit_eval_match");
  ExperimentConfig cfg;
  cfg.seed = 77;
  cfg.epochs = 3;
  cfg.train_samples = 24;
  cfg.eval_samples = 12;
  cfg.layers = {dense_layer(12)};
  const TrainResult trained = run_train(cfg, dir);
  ASSERT_EQ(trained.exit_code, 0);
  const EvalResult eval =
      run_eval(trained.checkpoint_path, "eval", "");
  EXPECT_EQ(eval.metric_name, "mse");
  EXPECT_EQ(eval.metric, trained.rows.back().eval_metric);

  // Decoding override still runs end to end.
  const EvalResult rate_eval = run_eval(trained.checkpoint_path, "eval", "rate");
  EXPECT_GE(rate_eval.metric, 0.0);
  EXPECT_THROW(run_eval(trained.checkpoint_path, "eval", "sum"), ConfigError);
  EXPECT_THROW(run_eval(trained.checkpoint_path, "half", ""), ConfigError);
}

TEST(TrainRunTest, GenDataRoundTripFeedsTraining) {
  const auto dir = temp_dir("spikekit_gendata");
  ExperimentConfig cfg;
  cfg.seed = 31;
  cfg.train_samples = 12;
  cfg.eval_samples = 6;
  run_gen_data(cfg, dir);
  ASSERT_TRUE(std::filesystem::exists(dir / "dataset_train.snnds"));
  ASSERT_TRUE(std::filesystem::exists(dir / "dataset_eval.snnds"));

  cfg.data_file = (dir / "dataset").string();
  cfg.epochs = 1;
  const TrainResult result = run_train(cfg, dir / "run");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.rows.size(), 1u);
}

TEST(EnergyRunTest, PublishedFiguresMatchExpectedRatios) {
  const auto dir = temp_dir("spikekit_energy_pub");
  const auto reports = run_energy_published(66.19, 0.425, {4, 6}, dir);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_NEAR(reports[0].ratio_per_op_static / 199.0, 1.0, 0.005);
  EXPECT_NEAR(reports[1].ratio_per_op_static / 132.7, 1.0, 0.005);
  EXPECT_TRUE(std::filesystem::exists(dir / "energy_report_T4.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "energy_report_T6.csv"));
}

TEST(EnergyRunTest, ForwardReportDoublesStaticEnergyWithT) {
  const auto dir = temp_dir("spikekit_energy_fwd");
  ExperimentConfig cfg;
  cfg.seed = 8;
  cfg.train_samples = 4;
  cfg.eval_samples = 4;
  const EnergyReport r1 = run_energy_forward(cfg, dir / "t4");
  cfg.time_steps = 8;
  const EnergyReport r2 = run_energy_forward(cfg, dir / "t8");
  EXPECT_DOUBLE_EQ(r2.snn_static_energy_per_op,
                   2.0 * r1.snn_static_energy_per_op);
  EXPECT_TRUE(std::filesystem::exists(dir / "t4" / "energy_report.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "t4" / "energy_report.csv"));
}

TEST(CompareRunTest, PairedRunsShareSeedAndWriteSeries) {
  const auto dir = temp_dir("spikekit_compare");
  ExperimentConfig cfg;
  cfg.seed = 19;
  cfg.epochs = 2;
  cfg.train_samples = 16;
  cfg.eval_samples = 8;
  cfg.layers = {dense_layer(10)};
  const CompareDecodingResult result = run_compare_decoding(cfg, dir);
  ASSERT_EQ(result.exit_code, 0);
  EXPECT_EQ(result.cmd_result.rows.size(), 2u);
  EXPECT_EQ(result.rate_result.rows.size(), 2u);
  const std::string csv = file_bytes(result.csv_path);
  EXPECT_NE(csv.find("epoch,cmd_train_loss"), std::string::npos);
  // Two header-plus-two-rows files.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
