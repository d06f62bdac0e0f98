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
#include <span>
#include <string>
#include <vector>

#include "htm/config.hpp"
#include "htm/corpus.hpp"
#include "htm/encoder.hpp"
#include "htm/fusion.hpp"
#include "htm/segment_types.hpp"
#include "htm/shs.hpp"
#include "htm/tfidf.hpp"
#include "htm/ths.hpp"

namespace htm {

/// Everything updated by the task-recognition optimizer.
struct Trainables {
  EncoderParams encoder;
  ShsParams shs;
  ThsParams ths;
  FusionParams fusion;

  /// Same shapes, all tensors zero.
  Trainables zeros_like() const;
};

/// Named view of one parameter tensor (column-major storage).
struct TensorRef {
  std::string name;
  double* data;
  Index rows;
  Index cols;

  Index size() const { return rows * cols; }
};

std::vector<TensorRef> tensors(Trainables& t);
std::vector<TensorRef> tensors(ActionHeadParams& h);

struct ModelParams {
  Trainables weights;
  ActionHeadParams action_head;
  Vocabularies vocab;
  TfidfTables tfidf;
  SegmentStats stats;
  int t_max_frames = 0;  // eval-time frame cap, 0 for none

  int num_tasks() const { return vocab.num_tasks(); }
  int num_attributes() const { return vocab.num_attributes(); }
  bool has_action_head() const { return action_head.weight.size() > 0; }
};

/// Seeded initialization: affine weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases,
/// w_alpha = 0.
Trainables init_trainables(Index feature_dim, int num_attributes, int num_tasks,
                           const TrainConfig& cfg, std::mt19937_64& rng);

/// Builds vocab/TF-IDF snapshots from the corpus and initializes weights from cfg.seed.
ModelParams init_model(const Corpus& corpus, const TrainConfig& cfg, Diagnostics* diags = nullptr);

/// Sampled randomness of one training-mode forward pass.
struct Realization {
  Matrix dropout_mask;
  int dropped = -1;
  TopkSelection selection;
};

struct VideoForward {
  EncoderCache enc;
  ShsOutputs shs;
  ThsOutputs ths;
  FusionOutputs fusion;

  Realization realization() const { return {enc.mask, ths.dropped, shs.selection}; }
};

VideoForward forward_video(const Trainables& w, const Matrix& tfidf_mask, const Matrix& features,
                           Phase phase, std::mt19937_64* rng, const Realization* fixed = nullptr);

/// Eval-mode fused task probabilities, on stratum midpoints when the video exceeds the cap.
Vector task_scores(const ModelParams& model, const Matrix& features);

struct Example {
  const Matrix* features;
  int task;
  Vector attr_target;
};

struct LossBreakdown {
  double total = 0.0;
  double semantic = 0.0;
  double temporal = 0.0;
  double fusion = 0.0;
};

/// Stream logits entering the fusion module (temporal, semantic).
struct StreamLogits {
  Vector ths;
  Vector shs;
};

/// Multipliers applied to each loss term in the objective (and its gradient).
struct LossWeights {
  double fusion = 1.0;
  double semantic = 1.0;
  double temporal = 1.0;
};

struct BatchOptions {
  Phase phase = Phase::kTrain;
  LossWeights weights;
  std::mt19937_64* rng = nullptr;
  const std::vector<Realization>* fixed = nullptr;
  /// When set, fusion consumes these instead of the live stream logits.
  const std::vector<StreamLogits>* frozen_streams = nullptr;
  std::vector<Realization>* record = nullptr;
  std::vector<StreamLogits>* record_streams = nullptr;
};

/// L = L_f + L_sh + beta * L_th over a batch (mean reductions). When grad is non-null, adds
/// analytic gradients; the fusion loss reaches stream parameters only for average fusion.
LossBreakdown batch_objective(const Trainables& w, const Matrix& tfidf_mask,
                              std::span<const Example> batch, const BatchOptions& opts,
                              Trainables* grad = nullptr);

}  // namespace htm
