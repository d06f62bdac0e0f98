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

#include <functional>
#include <random>
#include <vector>

#include "htm/config.hpp"
#include "htm/corpus.hpp"
#include "htm/model.hpp"

namespace htm {

/// Adam moments, one flat buffer per tensor in visitation order.
struct AdamState {
  std::vector<Vector> m;
  std::vector<Vector> v;
  long step = 0;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  bool decoupled = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One Adam update. params and grads must list the same tensors in the same order.
void adam_step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads,
               AdamState& state, const AdamConfig& cfg);

/// Frame indices kept by temporal sampling: all frames when T <= t_max, otherwise one frame per
/// equal stratum (random phase when training, stratum midpoint otherwise).
std::vector<Index> window_indices(Index frames, Index t_max, std::mt19937_64* rng, bool train);
Matrix sample_window(const Matrix& features, Index t_max, std::mt19937_64* rng, bool train);

struct LossRecord {
  int iteration;
  LossBreakdown loss;
};

using LossCallback = std::function<void(const LossRecord&)>;

/// Trains the two-stream task model. Deterministic given cfg.seed. The returned weights are
/// rounded to float precision so a checkpoint reproduces them exactly.
ModelParams train(const Corpus& corpus, const TrainConfig& cfg, const LossCallback& on_loss = {},
                  Diagnostics* diags = nullptr);

void round_to_float(std::vector<TensorRef> tensors);

}  // namespace htm
