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

#include "htm/corpus.hpp"
#include "htm/model.hpp"
#include "htm/segment_types.hpp"

namespace htm {

GrammarStore build_grammar_store(const Corpus& corpus);

/// Uniform-alignment Poisson means: each occurrence of an action in a transcript of length S
/// over T frames contributes (1 - background_share) * T / S; background slots share the rest.
DurationModel fit_durations(const Corpus& corpus, double background_share = 0.0,
                            double d_max_factor = 3.0);

double poisson_log_pmf(double lambda, int length);

/// Per-frame labels from evenly spreading a transcript over T frames. With background, S + 1
/// background slots jointly take background_share of the frames.
std::vector<int> uniform_alignment(Index frames, const ActionSeq& transcript, bool background,
                                   double background_share);

/// Class log-priors from the uniform-alignment frame frequencies of a corpus.
Vector uniform_alignment_log_prior(const Corpus& corpus, bool background, double background_share);

/// Trains the frame-level action head on frozen eval-mode encodings, starting from
/// uniform-alignment pseudo-labels and refitting after each of cfg.realign_rounds transcript
/// realignments. Also fills model.stats (grammars, durations, priors).
void fit_segmentation(const Corpus& corpus, const TrainConfig& cfg, ModelParams& model);

FrameScores frame_scores(const ModelParams& model, const Matrix& features);

struct DecodeOptions {
  bool background = false;  // optional background segment before, between and after actions
  int d_max = 0;            // 0: use the duration model's d_max; always clamped to T
};

struct Alignment {
  std::vector<Segment> segments;
  double log_score = 0.0;
};

/// Exact segmental Viterbi over boundary placements for one grammar. Maximizes the summed
/// frame likelihoods (log_post - log_prior) plus Poisson duration terms. Returns -inf score and
/// no segments when no placement fits within d_max.
Alignment align_grammar(const FrameScores& scores, const ActionSeq& grammar,
                        const DurationModel& durations, const DecodeOptions& opts = {});

/// Best alignment among the given grammar indices; ties go to the lower grammar index.
Segmentation decode(const FrameScores& scores, const std::vector<int>& subset,
                    const DurationModel& durations, const GrammarStore& store,
                    const DecodeOptions& opts = {}, Diagnostics* diags = nullptr);

enum class SegmentMode { kTopDown, kBottomUp, kOracleTask };

SegmentMode parse_segment_mode(const std::string& name);
std::string segment_mode_name(SegmentMode mode);

/// Grammar indices admitted for a task set; empty tasks fall back to all grammars.
std::vector<int> grammars_for_tasks(const GrammarStore& store, const std::vector<int>& tasks,
                                    Diagnostics* diags = nullptr);

/// Top-m predicted tasks in descending score order (ties to the lower index).
std::vector<int> top_tasks(const Vector& scores, int m);

/// Predicts the task from fused eval scores and decodes within that task's grammars.
Segmentation decode_topdown(const Matrix& features, const ModelParams& model, int top_m = 1,
                            Diagnostics* diags = nullptr);

/// Grammar indices searched for one video under a mode. task_probs is read by kTopDown only,
/// gt_task by kOracleTask only. constraint receives the restricting task or -1.
std::vector<int> mode_subset(const GrammarStore& store, SegmentMode mode, const Vector& task_probs,
                             int gt_task, int top_m, int* constraint = nullptr,
                             Diagnostics* diags = nullptr);

/// Decodes precomputed frame scores in the requested mode.
Segmentation segment_scores(const ModelParams& model, const FrameScores& scores,
                            const Vector& task_probs, SegmentMode mode, int gt_task = -1,
                            int top_m = 1, Diagnostics* diags = nullptr);

/// Decodes one video in the requested mode. gt_task is used only by kOracleTask.
Segmentation segment_video(const ModelParams& model, const Matrix& features, SegmentMode mode,
                           int gt_task = -1, int top_m = 1, Diagnostics* diags = nullptr);

DecodeOptions decode_options(const ModelParams& model);

}  // namespace htm
