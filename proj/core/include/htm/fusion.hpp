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

#include <string>

#include "htm/types.hpp"

namespace htm {

enum class FusionMode { kAverage, kWeighted, kGated };

FusionMode parse_fusion_mode(const std::string& name);
std::string fusion_mode_name(FusionMode mode);

struct FusionParams {
  FusionMode mode = FusionMode::kGated;
  Matrix w1;       // |C| x |C|, weighted mode
  Matrix w2;       // |C| x |C|, weighted mode
  Vector w_alpha;  // |C|, gated mode
  double beta = 0.25;
};

enum class Phase { kTrain, kEval };

struct FusionOutputs {
  Vector logits;
  Vector probs;
  Vector alpha;  // gated mode only
};

/// Combines temporal-stream and semantic-stream logits.
/// Gated eval selects the temporal stream where alpha >= 0.5.
FusionOutputs fuse(const Vector& ths_logits, const Vector& shs_logits, const FusionParams& params,
                   Phase phase);

/// True when the fusion loss must not reach the streams. Average fusion has no parameters of
/// its own and passes the gradient to both streams.
bool fusion_stops_stream_gradient(FusionMode mode);

/// Accumulates dL/d(fusion params) for training-phase fusion. When stream gradients are
/// requested (non-null) they receive dL/d(stream logits).
void fusion_backward(const Vector& dlogits, const Vector& ths_logits, const Vector& shs_logits,
                     const FusionParams& params, FusionParams& grad, Vector* dths = nullptr,
                     Vector* dshs = nullptr);

/// Argmax with ties to the lowest task index.
int predict_task(const Vector& scores);

}  // namespace htm
