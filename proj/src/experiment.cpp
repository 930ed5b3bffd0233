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

#include "spikekit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include "spikekit/detection.hpp"
#include "spikekit/training.hpp"

namespace spikekit {

namespace {

enum RngStream : std::uint64_t {
  kStreamInit = 1,
  kStreamTrainData = 2,
  kStreamEvalData = 3,
  kStreamShuffle = 4,
  kStreamAugment = 5,
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Dataset generate_dataset(const ExperimentConfig& cfg, std::uint64_t stream,
                         std::size_t n) {
  Rng rng(mix_seed(cfg.seed, stream));
  if (cfg.task == TaskKind::kRegression) {
    RegressionGenConfig gen;
    gen.channels = cfg.input_shape[0];
    gen.height = cfg.input_shape[1];
    gen.width = cfg.input_shape[2];
    gen.noise_level = cfg.noise;
    return generate_synthetic_regression(rng, n, gen);
  }
  DetectionGenConfig gen;
  gen.channels = cfg.input_shape[0];
  gen.height = cfg.input_shape[1];
  gen.width = cfg.input_shape[2];
  gen.grid = cfg.grid;
  gen.num_classes = cfg.num_classes;
  gen.max_objects = cfg.max_objects;
  gen.noise_level = cfg.noise;
  return generate_synthetic_detection(rng, n, gen);
}

void check_dataset(const Dataset& ds, const ExperimentConfig& cfg,
                   const char* which) {
  if (ds.samples.empty()) {
    throw std::runtime_error(std::string(which) + " dataset is empty");
  }
  if (ds.task != cfg.task) {
    throw std::runtime_error(std::string(which) +
                             " dataset task does not match the config");
  }
  if (ds.samples.front().image.shape() != cfg.input_shape) {
    throw std::runtime_error(std::string(which) + " dataset image shape " +
                             shape_to_string(ds.samples.front().image.shape()) +
                             " does not match net.input " +
                             shape_to_string(cfg.input_shape));
  }
}

}  // namespace

Dataset build_train_dataset(const ExperimentConfig& cfg) {
  Dataset ds = cfg.data_file.empty()
                   ? generate_dataset(cfg, kStreamTrainData, cfg.train_samples)
                   : load_dataset(cfg.data_file + "_train.snnds");
  check_dataset(ds, cfg, "train");
  return ds;
}

Dataset build_eval_dataset(const ExperimentConfig& cfg) {
  Dataset ds = cfg.data_file.empty()
                   ? generate_dataset(cfg, kStreamEvalData, cfg.eval_samples)
                   : load_dataset(cfg.data_file + "_eval.snnds");
  check_dataset(ds, cfg, "eval");
  return ds;
}

Network make_network(const ExperimentConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, kStreamInit));
  return Network::init(cfg.network_spec(), rng);
}

Network network_from_checkpoint(const ExperimentConfig& cfg,
                                const Checkpoint& ckpt) {
  Rng rng(mix_seed(cfg.seed, kStreamInit));
  Network net = Network::init(cfg.network_spec(), rng);
  if (net.params().size() != ckpt.params.size()) {
    throw std::runtime_error("checkpoint parameter count " +
                             std::to_string(ckpt.params.size()) +
                             " does not match the network (" +
                             std::to_string(net.params().size()) + ")");
  }
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    if (net.params()[i].name != ckpt.params[i].name ||
        !same_shape(net.params()[i].value, ckpt.params[i].value)) {
      throw std::runtime_error("checkpoint parameter '" + ckpt.params[i].name +
                               "' does not match the network layout");
    }
    net.params()[i].value = ckpt.params[i].value;
  }
  return net;
}

double evaluate_network(const Network& net, const Dataset& dataset,
                        const ExperimentConfig& cfg) {
  const AugmentConfig aug = cfg.augment_config();
  if (dataset.task == TaskKind::kRegression) {
    double total = 0.0;
    for (const SyntheticSample& sample : dataset.samples) {
      const Tensor image =
          normalize_image(sample.image, aug.mean, aug.std_dev);
      total += mse_loss(net.forward(image).output, sample.target);
    }
    return total / static_cast<double>(dataset.samples.size());
  }

  const DetectionGrid geometry = cfg.detection_grid();
  std::vector<std::vector<Detection>> detections;
  std::vector<std::vector<Box>> ground_truth;
  detections.reserve(dataset.samples.size());
  ground_truth.reserve(dataset.samples.size());
  for (const SyntheticSample& sample : dataset.samples) {
    const Tensor image = normalize_image(sample.image, aug.mean, aug.std_dev);
    detections.push_back(decode_grid(net.forward(image).output, geometry));
    ground_truth.push_back(sample.boxes);
  }
  return toy_map(detections, ground_truth, geometry.num_classes);
}

namespace {

struct SampleResult {
  std::vector<Tensor> grads;
  double loss = 0.0;
  double spikes = 0.0;
};

SampleResult process_sample(const Network& net, const ExperimentConfig& cfg,
                            const SyntheticSample& raw, bool flip) {
  const SyntheticSample sample =
      augment_with_flip(raw, flip, cfg.augment_config());
  Tape tape;
  const Network::Taped taped =
      net.forward(tape, sample.image, SpikeMode::kBinary);

  ValueId loss_id;
  if (cfg.task == TaskKind::kRegression) {
    loss_id = mse_loss(tape, taped.output, sample.target);
  } else {
    DetectionLossWeights weights;
    weights.coord = cfg.loss_coord;
    weights.noobj = cfg.loss_noobj;
    weights.cls = cfg.loss_class;
    loss_id = toy_detection_loss(tape, taped.output, sample.boxes,
                                 cfg.detection_grid(), weights);
  }
  tape.backward(loss_id);

  SampleResult result;
  result.loss = tape.value(loss_id)[0];
  result.grads.reserve(taped.param_ids.size());
  for (ValueId id : taped.param_ids) result.grads.push_back(tape.grad(id));
  const NetworkSpec& spec = net.spec();
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    if (!spec.layers[l].has_if_neurons) continue;
    for (ValueId s : taped.layer_spike_steps[l]) {
      result.spikes += sum(tape.value(s));
    }
  }
  return result;
}

Checkpoint snapshot(const ExperimentConfig& cfg, const Network& net,
                    const OptimizerState& opt, std::uint64_t epoch,
                    const Rng& rng_shuffle, const Rng& rng_augment) {
  Checkpoint ckpt;
  ckpt.config_echo = serialize_config(cfg);
  ckpt.epoch = epoch;
  ckpt.params = net.params();
  ckpt.velocity = opt.velocity;
  ckpt.rng_shuffle_state = rng_shuffle.save_state();
  ckpt.rng_augment_state = rng_augment.save_state();
  return ckpt;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write metrics file " + path.string());
  }
  out << "epoch,train_loss,eval_metric,learning_rate,avg_spikes_per_sample\n";
  for (const MetricsRow& row : rows) {
    out << row.epoch << "," << format_double(row.train_loss) << ","
        << format_double(row.eval_metric) << ","
        << format_double(row.learning_rate) << ","
        << format_double(row.avg_spikes_per_sample) << "\n";
  }
}

}  // namespace

TrainResult run_train(const ExperimentConfig& cfg,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Dataset train_ds = build_train_dataset(cfg);
  const Dataset eval_ds = build_eval_dataset(cfg);
  const std::size_t n = train_ds.samples.size();

  TrainResult result;
  result.metrics_csv = out_dir / "metrics.csv";
  result.checkpoint_path = out_dir / "checkpoint.bin";
  result.net = make_network(cfg);
  Network& net = result.net;

  OptimizerState opt = make_optimizer_state(net.params(), cfg.momentum,
                                            cfg.weight_decay, cfg.base_lr);
  Rng rng_shuffle(mix_seed(cfg.seed, kStreamShuffle));
  Rng rng_augment(mix_seed(cfg.seed, kStreamAugment));

  result.initial_eval = evaluate_network(net, eval_ds, cfg);
  Checkpoint last_good = snapshot(cfg, net, opt, 0, rng_shuffle, rng_augment);

  std::ofstream timing(out_dir / "timing.csv", std::ios::binary);
  timing << "epoch,wall_ms\n";

  bool aborted = false;
  for (std::size_t epoch = 0; epoch < cfg.epochs && !aborted; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    const double lr =
        cosine_lr({epoch, cfg.epochs, cfg.base_lr, cfg.min_lr});

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[rng_shuffle.index(i)]);
    }
    std::vector<char> flips(n, 0);
    const double flip_prob = cfg.augment_config().flip_prob;
    for (std::size_t i = 0; i < n; ++i) {
      flips[i] = rng_augment.bernoulli(flip_prob) ? 1 : 0;
    }

    double loss_sum = 0.0;
    double spike_sum = 0.0;
    for (std::size_t start = 0; start < n && !aborted;
         start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const std::size_t batch_n = end - start;
      std::vector<SampleResult> results(batch_n);

      const std::size_t workers =
          std::max<std::size_t>(1, std::min(cfg.threads, batch_n));
      std::vector<std::exception_ptr> failures(workers);
      auto work = [&](std::size_t w) {
        try {
          for (std::size_t k = w; k < batch_n; k += workers) {
            const std::size_t pos = start + k;
            results[k] = process_sample(net, cfg,
                                        train_ds.samples[order[pos]],
                                        flips[pos] != 0);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
      }
      for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
      }

      // Deterministic merge: sample order, then scale by the batch size.
      std::vector<Tensor> grads;
      grads.reserve(net.params().size());
      for (std::size_t p = 0; p < net.params().size(); ++p) {
        Tensor g = results[0].grads[p];
        for (std::size_t k = 1; k < batch_n; ++k) {
          g = add(g, results[k].grads[p]);
        }
        grads.push_back(scale(g, 1.0 / static_cast<double>(batch_n)));
      }

      double batch_loss = 0.0;
      for (const SampleResult& r : results) {
        batch_loss += r.loss;
        spike_sum += r.spikes;
      }
      loss_sum += batch_loss;
      if (!std::isfinite(batch_loss)) {
        aborted = true;
        break;
      }
      sgd_step(net.params(), grads, opt, lr);
    }

    if (aborted) break;

    MetricsRow row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(n);
    row.eval_metric = evaluate_network(net, eval_ds, cfg);
    row.learning_rate = lr;
    row.avg_spikes_per_sample = spike_sum / static_cast<double>(n);
    result.rows.push_back(row);

    const auto epoch_end = std::chrono::steady_clock::now();
    timing << epoch << ","
           << std::chrono::duration_cast<std::chrono::milliseconds>(
                  epoch_end - epoch_start)
                  .count()
           << "\n";

    last_good = snapshot(cfg, net, opt, epoch + 1, rng_shuffle, rng_augment);
  }

  write_metrics_csv(result.metrics_csv, result.rows);
  save_checkpoint(last_good, result.checkpoint_path);
  if (aborted) {
    result.exit_code = 2;
    result.net = network_from_checkpoint(cfg, last_good);
  }
  return result;
}

EvalResult run_eval(const std::filesystem::path& checkpoint_path,
                    const std::string& split,
                    const std::string& decoding_override) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  ExperimentConfig cfg = parse_config(ckpt.config_echo);
  if (!decoding_override.empty()) {
    if (decoding_override == "cmd") {
      cfg.decoding = DecodingMode::kCmd;
    } else if (decoding_override == "rate") {
      cfg.decoding = DecodingMode::kRate;
    } else {
      throw ConfigError("eval: decoding override must be cmd or rate");
    }
  }
  if (split != "train" && split != "eval") {
    throw ConfigError("eval: split must be train or eval");
  }
  const Network net = network_from_checkpoint(cfg, ckpt);
  const Dataset ds =
      split == "train" ? build_train_dataset(cfg) : build_eval_dataset(cfg);
  EvalResult result;
  result.metric = evaluate_network(net, ds, cfg);
  result.metric_name =
      cfg.task == TaskKind::kRegression ? "mse" : "toy_map";
  return result;
}

namespace {

void write_report_files(const EnergyReport& report,
                        const std::filesystem::path& txt,
                        const std::filesystem::path& csv) {
  std::ofstream t(txt, std::ios::binary);
  t << report.to_text();
  std::ofstream c(csv, std::ios::binary);
  c << report.to_csv();
  if (!t || !c) {
    throw std::runtime_error("cannot write energy report under " +
                             txt.parent_path().string());
  }
}

}  // namespace

EnergyReport run_energy_forward(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                const std::filesystem::path& checkpoint_path) {
  std::filesystem::create_directories(out_dir);
  Network net;
  if (checkpoint_path.empty()) {
    net = make_network(cfg);
  } else {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    net = network_from_checkpoint(cfg, ckpt);
  }
  const Dataset eval_ds = build_eval_dataset(cfg);
  const AugmentConfig aug = cfg.augment_config();
  const Tensor image =
      normalize_image(eval_ds.samples.front().image, aug.mean, aug.std_dev);
  const Network::Forward fwd = net.forward(image);
  const SpikeStats stats = collect_spike_stats(net, fwd);

  const NetworkSpec spec = cfg.network_spec();
  const EnergyModel model;
  const EnergyReport report = build_report(
      count_ann_ops(spec), count_snn_ops_static(spec, cfg.time_steps),
      count_snn_ops_activity(stats), model, cfg.time_steps);
  write_report_files(report, out_dir / "energy_report.txt",
                     out_dir / "energy_report.csv");
  return report;
}

std::vector<EnergyReport> run_energy_published(
    double ann_gflops, double snn_gflops,
    const std::vector<std::size_t>& t_values,
    const std::filesystem::path& out_dir) {
  if (ann_gflops <= 0.0 || snn_gflops <= 0.0) {
    throw ConfigError("energy: published GFLOP counts must be positive");
  }
  std::filesystem::create_directories(out_dir);
  const EnergyModel model;
  std::vector<EnergyReport> reports;
  for (std::size_t t : t_values) {
    if (t < 1) throw ConfigError("energy: time steps must be >= 1");
    OpCount ann;
    ann.macs = static_cast<std::uint64_t>(std::llround(ann_gflops * 1e9));
    OpCount snn;
    snn.acs =
        static_cast<std::uint64_t>(std::llround(snn_gflops * 1e9)) * t;
    // Published totals carry no activity record; the activity rows echo the
    // static accounting.
    EnergyReport report = build_report(ann, snn, snn, model, t);
    const std::string stem = "energy_report_T" + std::to_string(t);
    write_report_files(report, out_dir / (stem + ".txt"),
                       out_dir / (stem + ".csv"));
    reports.push_back(std::move(report));
  }
  return reports;
}

CompareDecodingResult run_compare_decoding(
    const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExperimentConfig cmd_cfg = cfg;
  cmd_cfg.decoding = DecodingMode::kCmd;
  ExperimentConfig rate_cfg = cfg;
  rate_cfg.decoding = DecodingMode::kRate;

  CompareDecodingResult result;
  result.cmd_result = run_train(cmd_cfg, out_dir / "cmd");
  result.rate_result = run_train(rate_cfg, out_dir / "rate");
  result.exit_code =
      std::max(result.cmd_result.exit_code, result.rate_result.exit_code);

  result.csv_path = out_dir / "compare_decoding.csv";
  std::ofstream out(result.csv_path, std::ios::binary);
  out << "epoch,cmd_train_loss,cmd_eval_metric,rate_train_loss,"
         "rate_eval_metric\n";
  const std::size_t rows = std::min(result.cmd_result.rows.size(),
                                    result.rate_result.rows.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const MetricsRow& c = result.cmd_result.rows[i];
    const MetricsRow& r = result.rate_result.rows[i];
    out << c.epoch << "," << format_double(c.train_loss) << ","
        << format_double(c.eval_metric) << "," << format_double(r.train_loss)
        << "," << format_double(r.eval_metric) << "\n";
  }
  return result;
}

void run_gen_data(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Dataset train_ds =
      generate_dataset(cfg, kStreamTrainData, cfg.train_samples);
  const Dataset eval_ds =
      generate_dataset(cfg, kStreamEvalData, cfg.eval_samples);
  save_dataset(train_ds, out_dir / "dataset_train.snnds");
  save_dataset(eval_ds, out_dir / "dataset_eval.snnds");
}

}  // namespace spikekit
