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

#include <map>
#include <vector>

#include "htm/types.hpp"

namespace htm {

/// Deduplicated training transcripts and their task ownership.
struct GrammarStore {
  std::vector<ActionSeq> all;                // distinct grammars, first-seen order
  std::vector<std::vector<int>> by_task;     // task -> grammar indices (ascending)
  std::vector<int> grammar_task;             // grammar -> majority task

  int size() const { return static_cast<int>(all.size()); }
  std::vector<int> all_indices() const;
  void validate() const;
};

/// Poisson segment-length model, one mean per action (index 0 is background).
struct DurationModel {
  Vector lambda;
  int d_max = 1;

  double log_pmf(int action, int length) const;
};

/// Per-frame action log-posteriors and log class priors.
struct FrameScores {
  Matrix log_post;  // |actions| x T
  Vector log_prior;

  Index num_frames() const { return log_post.cols(); }
};

struct Segment {
  int action = 0;
  Index start = 0;
  Index length = 0;

  bool operator==(const Segment&) const = default;
};

struct Segmentation {
  std::vector<int> labels;
  std::vector<Segment> segments;
  double log_score = 0.0;
  int grammar = -1;
  int task = -1;             // majority task of the winning grammar
  int constraint_task = -1;  // task that restricted the search, -1 for unconstrained
  int grammars_evaluated = 0;
};

/// Frame classifier over the action vocabulary (background included), applied to the encoding.
struct ActionHeadParams {
  Matrix weight;  // |actions| x F
  Vector bias;
};

/// Statistics gathered from the training corpus for decoding.
struct SegmentStats {
  GrammarStore grammars;
  DurationModel durations;
  Vector log_prior;
  bool background = true;  // decode optional background between actions
  double background_share = 0.0;
};

}  // namespace htm
