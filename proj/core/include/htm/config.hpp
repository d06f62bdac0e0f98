// Copyright 2026 The htm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "htm/corpus.hpp"
#include "htm/fusion.hpp"

namespace htm {

/// Hyperparameters for model construction, training and decoding.
struct TrainConfig {
  int batch_size = 10;
  double learning_rate = 1e-3;
  double weight_decay = 0.005;
  bool decoupled_weight_decay = true;
  int iterations = 2000;
  double lambda = 0.9;
  double beta = 0.25;
  int stages = 3;          // K
  int pool_divisor = 8;    // s
  int kernel_size = 15;    // L
  int encoder_dim = 64;    // F
  int hidden_dim = 256;    // F_g
  double keep_rate = 0.3;
  int t_max_frames = 512;
  FusionMode fusion_mode = FusionMode::kGated;
  double tfidf_eps = 1e-8;
  std::uint64_t seed = 1;

  // decoding
  bool decode_background = true;
  double background_share = 0.2;
  double duration_factor = 3.0;  // d_max = ceil(factor * max lambda)
  int top_m = 1;                 // tasks admitted by the top-down constraint
  int action_head_iterations = 300;
  int realign_rounds = 0;        // transcript realignments of the head's pseudo-labels
  double action_head_lr = 0.01;

  void validate() const;
};

/// Flat key=value configuration. Lines starting with '#' are comments.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(const std::filesystem::path& path);
KeyValues parse_overrides(const std::vector<std::string>& items);

/// Applies keys to cfg; throws ConfigError on unknown keys or bad values.
void apply(TrainConfig& cfg, const KeyValues& kv);
void apply(SynthConfig& cfg, const KeyValues& kv);

KeyValues to_key_values(const TrainConfig& cfg);
KeyValues to_key_values(const SynthConfig& cfg);

}  // namespace htm
