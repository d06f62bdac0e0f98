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

#include <vector>

#include "htm/types.hpp"

namespace htm {

/// Semantic hierarchy stream parameters.
struct ShsParams {
  Matrix attr_weight;  // |A| x F
  Vector attr_bias;    // |A|
  Matrix wc;           // |C| x |A|
  int s = 8;
  double lambda = 0.9;
};

/// Frame indices chosen by top-k pooling, one list per attribute row.
using TopkSelection = std::vector<std::vector<Index>>;

struct ShsOutputs {
  Matrix tcam;          // |A| x T
  Vector psi_a;         // |A|
  Vector psi_c_logits;  // |C|
  Vector psi_c_probs;
  Vector psi_a_probs;
  TopkSelection selection;
};

Matrix tcam(const Matrix& phi, const ShsParams& params);

/// k = max(1, floor(T / s)); ties among equal scores go to the lower frame index.
Vector topk_pool(const Matrix& tcam, int s, TopkSelection* selection = nullptr);
/// Mean over a previously recorded selection.
Vector topk_pool_fixed(const Matrix& tcam, const TopkSelection& selection);

/// mask is the |A| x |C| TF-IDF mask; it is applied transposed to wc.
struct TaskScores {
  Vector logits;
  Vector probs;
};
TaskScores shs_task_scores(const Vector& psi_a, const Matrix& wc, const Matrix& mask);

ShsOutputs shs_forward(const Matrix& phi, const ShsParams& params, const Matrix& mask,
                       const TopkSelection* fixed_selection = nullptr);

/// Batch semantic loss; targets are TF-IDF-weighted attribute vectors.
double semantic_loss(const std::vector<ShsOutputs>& batch, const std::vector<Vector>& attr_targets,
                     const std::vector<int>& tasks, double lambda);

/// Backpropagates upstream gradients w.r.t. psi_a and psi_c_logits of one video.
/// Accumulates parameter gradients into grad and returns dL/dphi.
Matrix shs_backward(const Matrix& phi, const ShsOutputs& out, const Vector& dpsi_a,
                    const Vector& dpsi_c_logits, const ShsParams& params, const Matrix& mask,
                    ShsParams& grad);

}  // namespace htm
