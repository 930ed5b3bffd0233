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

#ifndef SPIKEKIT_CHECKPOINT_HPP
#define SPIKEKIT_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spikekit/network.hpp"

namespace spikekit {

/// Versioned binary training snapshot. Magic "SNNCKPT1", little-endian
/// lengths, raw IEEE-754 64-bit parameter data; save -> load -> save is
/// byte-identical.
struct Checkpoint {
  std::uint32_t version = 1;
  std::string config_echo;  // canonical serialized config of the run
  std::uint64_t epoch = 0;
  std::vector<Parameter> params;
  std::vector<Tensor> velocity;
  std::string rng_shuffle_state;
  std::string rng_augment_state;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace spikekit

#endif  // SPIKEKIT_CHECKPOINT_HPP
