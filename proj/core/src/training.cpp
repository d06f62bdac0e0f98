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

#include "htm/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace htm {

void adam_step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads,
               AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: tensor count mismatch");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Vector::Zero(p.size()));
      state.v.push_back(Vector::Zero(p.size()));
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const double shrink = cfg.decoupled ? 1.0 - cfg.learning_rate * cfg.weight_decay : 1.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size()) throw std::invalid_argument("adam: shape mismatch");
    Eigen::Map<Vector> p(params[i].data, params[i].size());
    Vector g = Eigen::Map<const Vector>(grads[i].data, grads[i].size());
    if (!cfg.decoupled) g += cfg.weight_decay * p;
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g.cwiseAbs2();
    p *= shrink;
    p.array() -= cfg.learning_rate * (state.m[i].array() / c1) /
                 ((state.v[i].array() / c2).sqrt() + cfg.eps);
  }
}

std::vector<Index> window_indices(Index frames, Index t_max, std::mt19937_64* rng, bool train) {
  std::vector<Index> idx;
  if (frames <= t_max) {
    idx.resize(frames);
    std::iota(idx.begin(), idx.end(), Index{0});
    return idx;
  }
  const double width = static_cast<double>(frames) / static_cast<double>(t_max);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  for (Index i = 0; i < t_max; ++i) {
    const double offset = train ? phase(*rng) : 0.5;
    const auto t = static_cast<Index>(std::floor((static_cast<double>(i) + offset) * width));
    idx.push_back(std::min(t, frames - 1));
  }
  return idx;
}

Matrix sample_window(const Matrix& features, Index t_max, std::mt19937_64* rng, bool train) {
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (features.cols() <= t_max) return features;
  const auto idx = window_indices(features.cols(), t_max, rng, train);
  Matrix out(features.rows(), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Index>(i)) = features.col(idx[i]);
  return out;
}

void round_to_float(std::vector<TensorRef> ts) {
  for (auto& t : ts) {
    for (Index i = 0; i < t.size(); ++i) t.data[i] = static_cast<double>(static_cast<float>(t.data[i]));
  }
}

ModelParams train(const Corpus& corpus, const TrainConfig& cfg, const LossCallback& on_loss,
                  Diagnostics* diags) {
  if (corpus.videos.empty()) throw DataError("cannot train on an empty corpus");
  ModelParams model = init_model(corpus, cfg, diags);
  for (int c = 0; c < corpus.vocab.num_tasks(); ++c) {
    const bool seen = std::any_of(corpus.videos.begin(), corpus.videos.end(),
                                  [c](const VideoRecord& v) { return v.task == c; });
    if (!seen) diag(diags, "task '" + corpus.vocab.tasks[c] + "' has no training video");
  }

  std::vector<Vector> targets;
  for (const auto& v : corpus.videos) targets.push_back(weighted_attribute_target(v, model.tfidf));

  std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ULL);
  std::vector<int> order(corpus.videos.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  AdamState adam;
  const AdamConfig adam_cfg{cfg.learning_rate, cfg.weight_decay, cfg.decoupled_weight_decay};
  std::vector<Matrix> windows(cfg.batch_size);
  std::vector<Example> batch(cfg.batch_size);

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int b = 0; b < cfg.batch_size; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const int vi = order[cursor++];
      windows[b] = sample_window(corpus.videos[vi].features, cfg.t_max_frames, &rng, true);
      batch[b] = {&windows[b], corpus.videos[vi].task, targets[vi]};
    }
    Trainables grad = model.weights.zeros_like();
    BatchOptions opts;
    opts.phase = Phase::kTrain;
    opts.rng = &rng;
    const LossBreakdown loss = batch_objective(model.weights, model.tfidf.mask, batch, opts, &grad);
    adam_step(tensors(model.weights), tensors(grad), adam, adam_cfg);
    if (on_loss) on_loss({it, loss});
  }
  round_to_float(tensors(model.weights));
  return model;
}

}  // namespace htm
