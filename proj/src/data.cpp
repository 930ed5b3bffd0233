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

#include "spikekit/data.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace spikekit {

namespace {

struct PixelBounds {
  std::size_t min_x, min_y, max_x, max_y;
  bool any = false;

  void cover(std::size_t y, std::size_t x) {
    if (!any) {
      min_x = max_x = x;
      min_y = max_y = y;
      any = true;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
};

Box bounds_to_box(const PixelBounds& b, std::size_t h, std::size_t w,
                  std::size_t cls) {
  Box box;
  box.x = static_cast<double>(b.min_x) / static_cast<double>(w);
  box.y = static_cast<double>(b.min_y) / static_cast<double>(h);
  box.w = static_cast<double>(b.max_x + 1 - b.min_x) / static_cast<double>(w);
  box.h = static_cast<double>(b.max_y + 1 - b.min_y) / static_cast<double>(h);
  box.cls = cls;
  return box;
}

Tensor noise_image(Rng& rng, std::size_t c, std::size_t h, std::size_t w,
                   double level) {
  Tensor img({c, h, w});
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.uniform(0.0, level);
  return img;
}

std::vector<double> class_color(std::size_t cls, std::size_t channels,
                                Rng& rng) {
  std::vector<double> color(channels, 0.0);
  if (channels == 1) {
    color[0] = 0.9 - 0.35 * static_cast<double>(cls) + rng.uniform(-0.03, 0.03);
  } else {
    for (std::size_t c = 0; c < channels; ++c) color[c] = 0.25;
    color[cls % channels] = 0.9;
    for (std::size_t c = 0; c < channels; ++c) {
      color[c] = std::clamp(color[c] + rng.uniform(-0.05, 0.05), 0.0, 1.0);
    }
  }
  return color;
}

void paint(Tensor& img, std::size_t y, std::size_t x,
           const std::vector<double>& color) {
  for (std::size_t c = 0; c < color.size(); ++c) img.at(c, y, x) = color[c];
}

bool boxes_touch(const Box& a, const Box& b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h &&
         b.y < a.y + a.h;
}

}  // namespace

Dataset generate_synthetic_regression(Rng& rng, std::size_t n,
                                      const RegressionGenConfig& cfg) {
  if (n < 1) {
    throw std::invalid_argument("generate_synthetic_regression: n must be >= 1");
  }
  if (cfg.height < 4 || cfg.width < 4) {
    throw std::invalid_argument("generate_synthetic_regression: image too small");
  }
  Dataset ds;
  ds.task = TaskKind::kRegression;
  ds.num_classes = 1;
  ds.samples.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    SyntheticSample sample;
    sample.image =
        noise_image(rng, cfg.channels, cfg.height, cfg.width, cfg.noise_level);

    const std::size_t max_w = std::max<std::size_t>(2, cfg.width / 2);
    const std::size_t max_h = std::max<std::size_t>(2, cfg.height / 2);
    const std::size_t w_px = 2 + rng.index(max_w - 1);
    const std::size_t h_px = 2 + rng.index(max_h - 1);
    const std::size_t x0 = rng.index(cfg.width - w_px + 1);
    const std::size_t y0 = rng.index(cfg.height - h_px + 1);
    const double intensity = rng.uniform(0.7, 1.0);
    std::vector<double> color(cfg.channels, intensity);

    PixelBounds bounds;
    for (std::size_t y = y0; y < y0 + h_px; ++y) {
      for (std::size_t x = x0; x < x0 + w_px; ++x) {
        paint(sample.image, y, x, color);
        bounds.cover(y, x);
      }
    }
    const Box box = bounds_to_box(bounds, cfg.height, cfg.width, 0);
    sample.boxes.push_back(box);
    sample.target = Tensor({4}, {box.x, box.y, box.w, box.h});
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

Dataset generate_synthetic_detection(Rng& rng, std::size_t n,
                                     const DetectionGenConfig& cfg) {
  if (n < 1) {
    throw std::invalid_argument("generate_synthetic_detection: n must be >= 1");
  }
  if (cfg.num_classes < 1 || cfg.num_classes > 3) {
    throw std::invalid_argument(
        "generate_synthetic_detection: supports 1 to 3 classes");
  }
  if (cfg.channels != 1 && cfg.channels != 3) {
    throw std::invalid_argument(
        "generate_synthetic_detection: images must have 1 or 3 channels");
  }
  if (cfg.channels == 1 && cfg.num_classes > 2) {
    throw std::invalid_argument("generate_synthetic_detection: single-channel "
                                "images distinguish at most 2 classes");
  }
  if (cfg.grid < 1 || cfg.max_objects < 1) {
    throw std::invalid_argument(
        "generate_synthetic_detection: grid and max_objects must be >= 1");
  }
  if (cfg.noise_level > 0.4) {
    throw std::invalid_argument("generate_synthetic_detection: noise_level "
                                "above 0.4 would blur object boundaries");
  }

  Dataset ds;
  ds.task = TaskKind::kDetection;
  ds.num_classes = cfg.num_classes;
  ds.grid = cfg.grid;
  ds.samples.reserve(n);

  const double cell_h = static_cast<double>(cfg.height) / cfg.grid;
  const double cell_w = static_cast<double>(cfg.width) / cfg.grid;

  for (std::size_t i = 0; i < n; ++i) {
    SyntheticSample sample;
    sample.image =
        noise_image(rng, cfg.channels, cfg.height, cfg.width, cfg.noise_level);
    const std::size_t wanted = 1 + rng.index(cfg.max_objects);
    std::set<std::size_t> used_cells;

    for (std::size_t obj = 0; obj < wanted; ++obj) {
      const std::size_t cls = rng.index(cfg.num_classes);
      const bool disc = rng.index(2) == 1;
      const std::vector<double> color = class_color(cls, cfg.channels, rng);

      bool placed = false;
      for (std::size_t attempt = 0; attempt < 30 && !placed; ++attempt) {
        const std::size_t cell = rng.index(cfg.grid * cfg.grid);
        if (used_cells.count(cell)) continue;
        const std::size_t cell_row = cell / cfg.grid;
        const std::size_t cell_col = cell % cfg.grid;
        const double cy =
            (cell_row + rng.uniform(0.3, 0.7)) * cell_h;  // keep center in cell
        const double cx = (cell_col + rng.uniform(0.3, 0.7)) * cell_w;

        PixelBounds bounds;
        std::vector<std::pair<std::size_t, std::size_t>> pixels;
        if (disc) {
          const double r = rng.uniform(1.9, 2.7);
          for (std::size_t y = 0; y < cfg.height; ++y) {
            for (std::size_t x = 0; x < cfg.width; ++x) {
              const double dy = (y + 0.5) - cy;
              const double dx = (x + 0.5) - cx;
              if (dy * dy + dx * dx <= r * r) pixels.push_back({y, x});
            }
          }
        } else {
          const double half_w = rng.uniform(1.6, 2.4);
          const double half_h = rng.uniform(1.6, 2.4);
          for (std::size_t y = 0; y < cfg.height; ++y) {
            for (std::size_t x = 0; x < cfg.width; ++x) {
              if (std::abs((y + 0.5) - cy) <= half_h &&
                  std::abs((x + 0.5) - cx) <= half_w) {
                pixels.push_back({y, x});
              }
            }
          }
        }
        if (pixels.size() < 4) continue;
        for (const auto& [y, x] : pixels) bounds.cover(y, x);
        Box box = bounds_to_box(bounds, cfg.height, cfg.width, cls);

        bool collides = false;
        for (const Box& other : sample.boxes) {
          if (boxes_touch(box, other)) {
            collides = true;
            break;
          }
        }
        if (collides) continue;

        for (const auto& [y, x] : pixels) paint(sample.image, y, x, color);
        sample.boxes.push_back(box);
        used_cells.insert(cell);
        placed = true;
      }
    }

    if (sample.boxes.empty()) {
      // Guaranteed fallback: one centered rectangle.
      const std::size_t cls = rng.index(cfg.num_classes);
      const std::vector<double> color = class_color(cls, cfg.channels, rng);
      PixelBounds bounds;
      for (std::size_t y = cfg.height / 2 - 1; y <= cfg.height / 2 + 1; ++y) {
        for (std::size_t x = cfg.width / 2 - 1; x <= cfg.width / 2 + 1; ++x) {
          paint(sample.image, y, x, color);
          bounds.cover(y, x);
        }
      }
      sample.boxes.push_back(bounds_to_box(bounds, cfg.height, cfg.width, cls));
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

Dataset generate_synthetic_detection(Rng& rng, std::size_t n, std::size_t grid,
                                     std::size_t num_classes) {
  DetectionGenConfig cfg;
  cfg.grid = grid;
  cfg.num_classes = num_classes;
  return generate_synthetic_detection(rng, n, cfg);
}

namespace {

constexpr char kMagic[6] = {'S', 'N', 'N', 'D', 'S', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xFF),
                            static_cast<unsigned char>((v >> 8) & 0xFF),
                            static_cast<unsigned char>((v >> 16) & 0xFF),
                            static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_f32(std::ostream& out, double v) {
  float f = static_cast<float>(v);
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  write_u32(out, bits);
}

double read_f32(std::istream& in) {
  const std::uint32_t bits = read_u32(in);
  float f;
  std::memcpy(&f, &bits, 4);
  return static_cast<double>(f);
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  if (dataset.samples.empty()) {
    throw std::invalid_argument("save_dataset: dataset is empty");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_dataset: cannot open " + path.string());
  }
  const Shape& img_shape = dataset.samples.front().image.shape();
  const std::uint32_t target_dim =
      dataset.task == TaskKind::kRegression
          ? static_cast<std::uint32_t>(dataset.samples.front().target.size())
          : 0;

  out.write(kMagic, sizeof(kMagic));
  write_u32(out, 1);  // version
  write_u32(out, dataset.task == TaskKind::kRegression ? 0 : 1);
  write_u32(out, static_cast<std::uint32_t>(dataset.samples.size()));
  write_u32(out, static_cast<std::uint32_t>(img_shape[0]));
  write_u32(out, static_cast<std::uint32_t>(img_shape[1]));
  write_u32(out, static_cast<std::uint32_t>(img_shape[2]));
  write_u32(out, target_dim);
  write_u32(out, static_cast<std::uint32_t>(dataset.num_classes));
  write_u32(out, static_cast<std::uint32_t>(dataset.grid));
  if (dataset.task == TaskKind::kDetection) {
    for (const SyntheticSample& s : dataset.samples) {
      write_u32(out, static_cast<std::uint32_t>(s.boxes.size()));
    }
  }
  for (const SyntheticSample& s : dataset.samples) {
    if (s.image.shape() != img_shape) {
      throw std::invalid_argument("save_dataset: inconsistent image shapes");
    }
    for (std::size_t i = 0; i < s.image.size(); ++i) write_f32(out, s.image[i]);
  }
  for (const SyntheticSample& s : dataset.samples) {
    if (dataset.task == TaskKind::kRegression) {
      for (std::size_t i = 0; i < s.target.size(); ++i) {
        write_f32(out, s.target[i]);
      }
    } else {
      for (const Box& b : s.boxes) {
        write_f32(out, b.x);
        write_f32(out, b.y);
        write_f32(out, b.w);
        write_f32(out, b.h);
        write_f32(out, static_cast<double>(b.cls));
      }
    }
  }
  if (!out) {
    throw std::runtime_error("save_dataset: write failed for " + path.string());
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_dataset: cannot open " + path.string());
  }
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) {
    throw std::runtime_error("load_dataset: bad magic in " + path.string());
  }
  const std::uint32_t version = read_u32(in);
  if (version != 1) {
    throw std::runtime_error("load_dataset: unsupported version " +
                             std::to_string(version));
  }
  Dataset ds;
  ds.task = read_u32(in) == 0 ? TaskKind::kRegression : TaskKind::kDetection;
  const std::uint32_t n = read_u32(in);
  const std::uint32_t c = read_u32(in);
  const std::uint32_t h = read_u32(in);
  const std::uint32_t w = read_u32(in);
  const std::uint32_t target_dim = read_u32(in);
  ds.num_classes = read_u32(in);
  ds.grid = read_u32(in);

  std::vector<std::uint32_t> box_counts;
  if (ds.task == TaskKind::kDetection) {
    box_counts.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) box_counts[i] = read_u32(in);
  }
  ds.samples.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Tensor img({c, h, w});
    for (std::size_t p = 0; p < img.size(); ++p) img[p] = read_f32(in);
    ds.samples[i].image = std::move(img);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (ds.task == TaskKind::kRegression) {
      Tensor target({target_dim});
      for (std::uint32_t p = 0; p < target_dim; ++p) target[p] = read_f32(in);
      ds.samples[i].target = target;
      Box box{target[0], target[1], target[2], target[3], 0};
      ds.samples[i].boxes.push_back(box);
    } else {
      for (std::uint32_t b = 0; b < box_counts[i]; ++b) {
        Box box;
        box.x = read_f32(in);
        box.y = read_f32(in);
        box.w = read_f32(in);
        box.h = read_f32(in);
        box.cls = static_cast<std::size_t>(read_f32(in));
        ds.samples[i].boxes.push_back(box);
      }
    }
  }
  if (!in) {
    throw std::runtime_error("load_dataset: truncated file " + path.string());
  }
  return ds;
}

}  // namespace spikekit
