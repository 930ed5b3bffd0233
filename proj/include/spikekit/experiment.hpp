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

#ifndef SPIKEKIT_EXPERIMENT_HPP
#define SPIKEKIT_EXPERIMENT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "spikekit/checkpoint.hpp"
#include "spikekit/config.hpp"
#include "spikekit/energy.hpp"
#include "spikekit/network.hpp"

namespace spikekit {

/// One deterministic metrics record per epoch. Wall-clock timings go to a
/// separate timing.csv so metrics.csv stays byte-reproducible.
struct MetricsRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double eval_metric = 0.0;
  double learning_rate = 0.0;
  double avg_spikes_per_sample = 0.0;
};

struct TrainResult {
  int exit_code = 0;  // 0 ok; 2 when training aborted on non-finite loss
  double initial_eval = 0.0;  // eval metric of the freshly initialized net
  std::vector<MetricsRow> rows;
  std::filesystem::path metrics_csv;
  std::filesystem::path checkpoint_path;
  Network net;
};

/// Full training run: builds datasets, trains, writes metrics.csv,
/// timing.csv, and checkpoint.bin under out_dir. A non-finite loss aborts
/// with exit code 2, keeping the checkpoint of the last completed epoch.
TrainResult run_train(const ExperimentConfig& cfg,
                      const std::filesystem::path& out_dir);

struct EvalResult {
  double metric = 0.0;
  std::string metric_name;  // "mse" or "toy_map"
};

/// Re-evaluates a checkpoint on the train or eval split, optionally
/// overriding the decoding head ("cmd" or "rate"; empty keeps the trained
/// mode).
EvalResult run_eval(const std::filesystem::path& checkpoint_path,
                    const std::string& split,
                    const std::string& decoding_override);

/// Forward-pass energy report for the configured network (parameters from
/// the checkpoint when given, otherwise freshly initialized); writes
/// energy_report.txt and energy_report.csv under out_dir.
EnergyReport run_energy_forward(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                const std::filesystem::path& checkpoint_path = {});

/// Feeds externally published FLOP totals through the same energy
/// calculators, one report per requested time-step count; writes
/// energy_report_T<t>.{txt,csv}.
std::vector<EnergyReport> run_energy_published(
    double ann_gflops, double snn_gflops,
    const std::vector<std::size_t>& t_values,
    const std::filesystem::path& out_dir);

struct CompareDecodingResult {
  int exit_code = 0;
  TrainResult cmd_result;
  TrainResult rate_result;
  std::filesystem::path csv_path;
};

/// Trains two identically seeded networks differing only in decoding mode on
/// the same task and writes the paired per-epoch series to
/// compare_decoding.csv.
CompareDecodingResult run_compare_decoding(const ExperimentConfig& cfg,
                                           const std::filesystem::path& out_dir);

/// Writes dataset_train.snnds and dataset_eval.snnds under out_dir.
void run_gen_data(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);

// Shared building blocks, exposed for the test suites.
Dataset build_train_dataset(const ExperimentConfig& cfg);
Dataset build_eval_dataset(const ExperimentConfig& cfg);
Network make_network(const ExperimentConfig& cfg);
Network network_from_checkpoint(const ExperimentConfig& cfg,
                                const Checkpoint& ckpt);
double evaluate_network(const Network& net, const Dataset& dataset,
                        const ExperimentConfig& cfg);

}  // namespace spikekit

#endif  // SPIKEKIT_EXPERIMENT_HPP
