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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikekit/experiment.hpp"

namespace {

using spikekit::ConfigError;
using spikekit::ExperimentConfig;

// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "seed override")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads,
                  "batch-parallel gradient workers (1 = reproducible "
                  "reference)");
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? ExperimentConfig{}
                             : spikekit::load_config(opts.config_path);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.threads > 0) cfg.threads = opts.threads;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiking-network training, evaluation, and energy profiling"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  CLI::App* train = app.add_subcommand(
      "train", "train a network and write metrics.csv plus a checkpoint");
  add_common(train, train_opts);

  std::string eval_checkpoint;
  std::string eval_split = "eval";
  std::string eval_decoding;
  CLI::App* eval =
      app.add_subcommand("eval", "re-evaluate a checkpoint on a dataset split");
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")
      ->required();
  eval->add_option("--split", eval_split, "train or eval (default eval)");
  eval->add_option("--decoding", eval_decoding,
                   "override the decoding head: cmd or rate");

  CommonOptions energy_opts;
  bool paper_numbers = false;
  double ann_gflops = 66.19;
  double snn_gflops = 0.425;
  std::vector<std::size_t> t_values;
  std::string energy_checkpoint;
  CLI::App* energy = app.add_subcommand(
      "energy", "emit an operation-count and energy report");
  add_common(energy, energy_opts);
  energy->add_option("--checkpoint", energy_checkpoint,
                     "use this checkpoint's parameters for the forward pass");
  energy->add_flag("--paper-numbers", paper_numbers,
                   "run the calculators on externally published FLOP totals "
                   "instead of the configured network");
  energy->add_option("--ann-gflops", ann_gflops,
                     "published conventional-network GFLOPs");
  energy->add_option("--snn-gflops", snn_gflops,
                     "published per-step spiking-network GFLOPs");
  energy->add_option("--time-steps", t_values,
                     "time-step counts for --paper-numbers (default 4 6)");

  CommonOptions compare_opts;
  CLI::App* compare = app.add_subcommand(
      "compare-decoding",
      "train cmd and rate decoding heads from one seed and emit paired "
      "metrics");
  add_common(compare, compare_opts);

  CommonOptions gen_opts;
  CLI::App* gen =
      app.add_subcommand("gen-data", "write the synthetic dataset cache");
  add_common(gen, gen_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (train->parsed()) {
      const ExperimentConfig cfg = resolve_config(train_opts);
      const spikekit::TrainResult result = spikekit::run_train(cfg, cfg.out_dir);
      if (result.exit_code != 0) {
        std::cerr << "training aborted on non-finite loss; last good "
                     "checkpoint kept at "
                  << result.checkpoint_path.string() << "\n";
        return kRuntimeError;
      }
      std::cout << "trained " << result.rows.size() << " epochs";
      if (!result.rows.empty()) {
        std::cout << "; final train_loss = "
                  << result.rows.back().train_loss
                  << ", eval_metric = " << result.rows.back().eval_metric;
      }
      std::cout << "\nmetrics: " << result.metrics_csv.string()
                << "\ncheckpoint: " << result.checkpoint_path.string() << "\n";
      return kOk;
    }

    if (eval->parsed()) {
      const spikekit::EvalResult result =
          spikekit::run_eval(eval_checkpoint, eval_split, eval_decoding);
      std::cout << result.metric_name << " = " << result.metric << "\n";
      return kOk;
    }

    if (energy->parsed()) {
      if (paper_numbers) {
        if (t_values.empty()) t_values = {4, 6};
        const ExperimentConfig cfg = resolve_config(energy_opts);
        const auto reports = spikekit::run_energy_published(
            ann_gflops, snn_gflops, t_values, cfg.out_dir);
        for (const spikekit::EnergyReport& report : reports) {
          std::cout << "T=" << report.time_steps
                    << " per-op ann/snn = " << report.ratio_per_op_static
                    << ", chip ann/snn = " << report.ratio_chip_static << "\n";
        }
      } else {
        const ExperimentConfig cfg = resolve_config(energy_opts);
        const spikekit::EnergyReport report = spikekit::run_energy_forward(
            cfg, cfg.out_dir, energy_checkpoint);
        std::cout << report.to_text();
      }
      return kOk;
    }

    if (compare->parsed()) {
      const ExperimentConfig cfg = resolve_config(compare_opts);
      const spikekit::CompareDecodingResult result =
          spikekit::run_compare_decoding(cfg, cfg.out_dir);
      if (result.exit_code != 0) {
        std::cerr << "one of the paired runs aborted on non-finite loss\n";
        return kRuntimeError;
      }
      const auto& cmd_rows = result.cmd_result.rows;
      const auto& rate_rows = result.rate_result.rows;
      if (!cmd_rows.empty() && !rate_rows.empty()) {
        std::cout << "final eval: cmd = " << cmd_rows.back().eval_metric
                  << ", rate = " << rate_rows.back().eval_metric << "\n";
      }
      std::cout << "series: " << result.csv_path.string() << "\n";
      return kOk;
    }

    if (gen->parsed()) {
      const ExperimentConfig cfg = resolve_config(gen_opts);
      spikekit::run_gen_data(cfg, cfg.out_dir);
      std::cout << "datasets written under " << cfg.out_dir << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
