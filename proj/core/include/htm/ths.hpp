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

#include <random>
#include <utility>
#include <vector>

#include "htm/types.hpp"

namespace htm {

/// Temporal hierarchy stream parameters: one linear classifier per stage plus aggregation.
struct ThsParams {
  std::vector<Matrix> stage_weights;  // K x (|C| x F)
  std::vector<Vector> stage_biases;   // K x |C|
  Matrix w_total;                     // (K * |C|) x |C|

  int stages() const { return static_cast<int>(stage_weights.size()); }
};

struct ThsOutputs {
  Matrix h;             // K x F
  Matrix stage_logits;  // K x |C|
  Matrix stage_probs;   // K x |C|
  Matrix masked;        // stage logits after stage dropout
  int dropped = -1;     // stage removed by dropout, -1 when none
  Vector total_logits;
  Vector total_probs;
};

/// [begin, end) frame range of each of K equal stages; the last absorbs the remainder.
std::vector<std::pair<Index, Index>> stage_bounds(Index frames, int stages);

Matrix stage_summaries(const Matrix& phi, int stages);
Matrix stage_logits(const Matrix& h, const ThsParams& params);

/// Zeroes one stage row and rescales the rest by K/(K-1). Identity in eval mode and for K=1.
Matrix stage_dropout(const Matrix& values, bool train, std::mt19937_64* rng, int* dropped = nullptr,
                     Diagnostics* diags = nullptr);
Matrix stage_dropout_at(const Matrix& values, int dropped);

Vector aggregate_stages(const Matrix& masked, const Matrix& w_total);

/// fixed_dropped >= 0 reuses a recorded stage choice; -2 samples a new one.
ThsOutputs ths_forward(const Matrix& phi, const ThsParams& params, bool train,
                       std::mt19937_64* rng, int fixed_dropped = -2);

double temporal_loss(const std::vector<ThsOutputs>& batch, const std::vector<int>& tasks);

/// Accumulates gradients into grad and returns dL/dphi.
Matrix ths_backward(const Matrix& phi, const ThsOutputs& out, const Vector& dtotal_logits,
                    const Matrix& dstage_logits, const ThsParams& params, ThsParams& grad);

}  // namespace htm
