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

#include "spikekit/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace spikekit {

namespace {

constexpr char kMagic[8] = {'S', 'N', 'N', 'C', 'K', 'P', 'T', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_tensor(std::ostream& out, const Tensor& t) {
  write_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) write_u64(out, d);
  for (std::size_t i = 0; i < t.size(); ++i) write_f64(out, t[i]);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string read_string(std::istream& in) {
  const std::uint64_t len = read_u64(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  return s;
}

Tensor read_tensor(std::istream& in) {
  const std::uint32_t rank = read_u32(in);
  Shape shape(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape[i] = static_cast<std::size_t>(read_u64(in));
  }
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = read_f64(in);
  return t;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_checkpoint: cannot open " + path.string());
  }
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, ckpt.version);
  write_string(out, ckpt.config_echo);
  write_u64(out, ckpt.epoch);
  write_u32(out, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const Parameter& p : ckpt.params) {
    write_string(out, p.name);
    out.put(p.weight_decay ? 1 : 0);
    write_tensor(out, p.value);
  }
  write_u32(out, static_cast<std::uint32_t>(ckpt.velocity.size()));
  for (const Tensor& t : ckpt.velocity) write_tensor(out, t);
  write_string(out, ckpt.rng_shuffle_state);
  write_string(out, ckpt.rng_augment_state);
  if (!out) {
    throw std::runtime_error("save_checkpoint: write failed for " +
                             path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_checkpoint: cannot open " + path.string());
  }
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
  }
  Checkpoint ckpt;
  ckpt.version = read_u32(in);
  if (ckpt.version != 1) {
    throw std::runtime_error("load_checkpoint: unsupported version " +
                             std::to_string(ckpt.version));
  }
  ckpt.config_echo = read_string(in);
  ckpt.epoch = read_u64(in);
  const std::uint32_t n_params = read_u32(in);
  ckpt.params.reserve(n_params);
  for (std::uint32_t i = 0; i < n_params; ++i) {
    Parameter p;
    p.name = read_string(in);
    p.weight_decay = in.get() != 0;
    p.value = read_tensor(in);
    ckpt.params.push_back(std::move(p));
  }
  const std::uint32_t n_vel = read_u32(in);
  ckpt.velocity.reserve(n_vel);
  for (std::uint32_t i = 0; i < n_vel; ++i) {
    ckpt.velocity.push_back(read_tensor(in));
  }
  ckpt.rng_shuffle_state = read_string(in);
  ckpt.rng_augment_state = read_string(in);
  if (!in) {
    throw std::runtime_error("load_checkpoint: truncated file " +
                             path.string());
  }
  return ckpt;
}

}  // namespace spikekit
