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

#include <cmath>
#include <random>

#include "htm/nn.hpp"
#include "htm/segment.hpp"
#include "htm/training.hpp"

namespace htm {

void fit_segmentation(const Corpus& corpus, const TrainConfig& cfg, ModelParams& model) {
  auto& stats = model.stats;
  stats.background = cfg.decode_background;
  stats.background_share = cfg.decode_background ? cfg.background_share : 0.0;
  stats.grammars = build_grammar_store(corpus);
  stats.durations = fit_durations(corpus, stats.background_share, cfg.duration_factor);
  stats.log_prior = uniform_alignment_log_prior(corpus, stats.background, stats.background_share);

  // Frozen eval-mode encodings of every training frame.
  Index total = 0;
  for (const auto& v : corpus.videos) total += v.num_frames();
  const Index enc_dim = model.weights.encoder.output_dim();
  Matrix phi(enc_dim, total);
  std::vector<Index> offsets;
  Index col = 0;
  for (const auto& v : corpus.videos) {
    offsets.push_back(col);
    phi.middleCols(col, v.num_frames()) = encode_forward(v.features, model.weights.encoder).phi;
    col += v.num_frames();
  }

  const int classes = corpus.vocab.num_actions();
  const double bound = 1.0 / std::sqrt(static_cast<double>(enc_dim));
  ActionHeadParams& head = model.action_head;
  auto fit_head = [&](const std::vector<int>& labels) {
    std::mt19937_64 rng(cfg.seed + 2);
    std::uniform_real_distribution<double> u(-bound, bound);
    head.weight = Matrix::NullaryExpr(classes, enc_dim, [&] { return u(rng); });
    head.bias = Vector::Zero(classes);
    Matrix targets = Matrix::Zero(classes, total);
    for (Index t = 0; t < total; ++t) targets(labels[static_cast<std::size_t>(t)], t) = 1.0;

    AdamState adam;
    const AdamConfig adam_cfg{cfg.action_head_lr, 0.0, true};
    ActionHeadParams grad;
    for (int it = 0; it < cfg.action_head_iterations; ++it) {
      Matrix logits = head.weight * phi;
      logits.colwise() += head.bias;
      // softmax per column, then d(mean CE)/dlogits = (p - y) / N
      for (Index t = 0; t < total; ++t) logits.col(t) = softmax(logits.col(t));
      const Matrix dlogits = (logits - targets) / static_cast<double>(total);
      grad.weight = dlogits * phi.transpose();
      grad.bias = dlogits.rowwise().sum();
      adam_step(tensors(head), tensors(grad), adam, adam_cfg);
    }
  };

  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));
  for (const auto& v : corpus.videos) {
    const auto l = uniform_alignment(v.num_frames(), v.transcript, stats.background,
                                     stats.background_share);
    labels.insert(labels.end(), l.begin(), l.end());
  }
  fit_head(labels);

  // Realignment: relabel each video by aligning its own transcript to the current head.
  const DecodeOptions opts = decode_options(model);
  for (int round = 0; round < cfg.realign_rounds; ++round) {
    labels.clear();
    for (std::size_t i = 0; i < corpus.videos.size(); ++i) {
      const auto& v = corpus.videos[i];
      Matrix logits = head.weight * phi.middleCols(offsets[i], v.num_frames());
      logits.colwise() += head.bias;
      FrameScores scores;
      scores.log_post.resize(classes, v.num_frames());
      for (Index t = 0; t < v.num_frames(); ++t) scores.log_post.col(t) = log_softmax(logits.col(t));
      scores.log_prior = stats.log_prior;
      const Alignment a = align_grammar(scores, v.transcript, stats.durations, opts);
      if (a.segments.empty()) {
        const auto l = uniform_alignment(v.num_frames(), v.transcript, stats.background,
                                         stats.background_share);
        labels.insert(labels.end(), l.begin(), l.end());
        continue;
      }
      for (const auto& s : a.segments) labels.insert(labels.end(), s.length, s.action);
    }
    fit_head(labels);
  }
  round_to_float(tensors(head));
}

}  // namespace htm
