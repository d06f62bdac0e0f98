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

#include "htm/model.hpp"

#include <cmath>

#include "htm/nn.hpp"
#include "htm/training.hpp"

namespace htm {

namespace {

Matrix uniform_init(Index rows, Index cols, Index fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = u(rng);
  }
  return m;
}

template <class T>
void push(std::vector<TensorRef>& out, std::string name, T& t) {
  if (t.size() == 0) return;
  out.push_back({std::move(name), t.data(), t.rows(), t.cols()});
}

}  // namespace

std::vector<TensorRef> tensors(Trainables& t) {
  std::vector<TensorRef> out;
  push(out, "encoder.g_weight", t.encoder.g_weight);
  push(out, "encoder.g_bias", t.encoder.g_bias);
  push(out, "encoder.kernels", t.encoder.kernels);
  push(out, "shs.attr_weight", t.shs.attr_weight);
  push(out, "shs.attr_bias", t.shs.attr_bias);
  push(out, "shs.wc", t.shs.wc);
  for (int k = 0; k < t.ths.stages(); ++k) {
    push(out, "ths.stage_weight." + std::to_string(k), t.ths.stage_weights[k]);
    push(out, "ths.stage_bias." + std::to_string(k), t.ths.stage_biases[k]);
  }
  push(out, "ths.w_total", t.ths.w_total);
  push(out, "fusion.w1", t.fusion.w1);
  push(out, "fusion.w2", t.fusion.w2);
  push(out, "fusion.w_alpha", t.fusion.w_alpha);
  return out;
}

std::vector<TensorRef> tensors(ActionHeadParams& h) {
  std::vector<TensorRef> out;
  push(out, "action_head.weight", h.weight);
  push(out, "action_head.bias", h.bias);
  return out;
}

Trainables Trainables::zeros_like() const {
  Trainables z = *this;
  for (auto& t : tensors(z)) std::fill(t.data, t.data + t.size(), 0.0);
  return z;
}

Trainables init_trainables(Index feature_dim, int num_attributes, int num_tasks,
                           const TrainConfig& cfg, std::mt19937_64& rng) {
  Trainables w;
  const Index hidden = cfg.hidden_dim;
  const Index enc = cfg.encoder_dim;
  w.encoder.kernel_size = cfg.kernel_size;
  w.encoder.keep_rate = cfg.keep_rate;
  w.encoder.g_weight = uniform_init(hidden, feature_dim, feature_dim, rng);
  w.encoder.g_bias = Vector::Zero(hidden);
  w.encoder.kernels = uniform_init(enc, cfg.kernel_size * hidden, cfg.kernel_size * hidden, rng);
  w.encoder.check();

  w.shs.s = cfg.pool_divisor;
  w.shs.lambda = cfg.lambda;
  w.shs.attr_weight = uniform_init(num_attributes, enc, enc, rng);
  w.shs.attr_bias = Vector::Zero(num_attributes);
  w.shs.wc = uniform_init(num_tasks, num_attributes, num_attributes, rng);

  for (int k = 0; k < cfg.stages; ++k) {
    w.ths.stage_weights.push_back(uniform_init(num_tasks, enc, enc, rng));
    w.ths.stage_biases.push_back(Vector::Zero(num_tasks));
  }
  w.ths.w_total = uniform_init(Index(cfg.stages) * num_tasks, num_tasks,
                               Index(cfg.stages) * num_tasks, rng);

  w.fusion.mode = cfg.fusion_mode;
  w.fusion.beta = cfg.beta;
  if (cfg.fusion_mode == FusionMode::kWeighted) {
    w.fusion.w1 = uniform_init(num_tasks, num_tasks, num_tasks, rng);
    w.fusion.w2 = uniform_init(num_tasks, num_tasks, num_tasks, rng);
  } else if (cfg.fusion_mode == FusionMode::kGated) {
    w.fusion.w_alpha = Vector::Zero(num_tasks);
  }
  return w;
}

ModelParams init_model(const Corpus& corpus, const TrainConfig& cfg, Diagnostics* diags) {
  cfg.validate();
  ModelParams m;
  m.vocab = corpus.vocab;
  m.tfidf = build_tfidf(corpus, cfg.tfidf_eps, diags);
  m.t_max_frames = cfg.t_max_frames;
  std::mt19937_64 rng(cfg.seed);
  m.weights = init_trainables(corpus.feature_dim(), m.num_attributes(), m.num_tasks(), cfg, rng);
  return m;
}

VideoForward forward_video(const Trainables& w, const Matrix& tfidf_mask, const Matrix& features,
                           Phase phase, std::mt19937_64* rng, const Realization* fixed) {
  const bool train = phase == Phase::kTrain;
  VideoForward f;
  EncodeOptions eo{train, rng, nullptr};
  if (fixed != nullptr && fixed->dropout_mask.size() > 0) eo.fixed_mask = &fixed->dropout_mask;
  f.enc = encode_forward(features, w.encoder, eo);
  f.shs = shs_forward(f.enc.phi, w.shs, tfidf_mask, fixed ? &fixed->selection : nullptr);
  f.ths = ths_forward(f.enc.phi, w.ths, train, rng, fixed ? fixed->dropped : -2);
  f.fusion = fuse(f.ths.total_logits, f.shs.psi_c_logits, w.fusion, phase);
  return f;
}

Vector task_scores(const ModelParams& model, const Matrix& features) {
  if (model.t_max_frames > 0 && features.cols() > model.t_max_frames) {
    const Matrix window = sample_window(features, model.t_max_frames, nullptr, false);
    return forward_video(model.weights, model.tfidf.mask, window, Phase::kEval, nullptr).fusion.probs;
  }
  return forward_video(model.weights, model.tfidf.mask, features, Phase::kEval, nullptr)
      .fusion.probs;
}

LossBreakdown batch_objective(const Trainables& w, const Matrix& tfidf_mask,
                              std::span<const Example> batch, const BatchOptions& opts,
                              Trainables* grad) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double n = static_cast<double>(batch.size());
  const double lambda = w.shs.lambda;
  const double beta = w.fusion.beta;
  const bool stop = fusion_stops_stream_gradient(w.fusion.mode);
  const Index num_tasks = w.shs.wc.rows();

  if (opts.record) opts.record->clear();
  if (opts.record_streams) opts.record_streams->clear();

  LossBreakdown loss;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& ex = batch[i];
    const Realization* fixed = opts.fixed ? &(*opts.fixed)[i] : nullptr;
    VideoForward f = forward_video(w, tfidf_mask, *ex.features, opts.phase, opts.rng, fixed);
    if (opts.record) opts.record->push_back(f.realization());
    if (opts.record_streams) opts.record_streams->push_back({f.ths.total_logits, f.shs.psi_c_logits});

    const StreamLogits* frozen = opts.frozen_streams ? &(*opts.frozen_streams)[i] : nullptr;
    if (frozen != nullptr) f.fusion = fuse(frozen->ths, frozen->shs, w.fusion, opts.phase);
    const Vector& fused_ths = frozen ? frozen->ths : f.ths.total_logits;
    const Vector& fused_shs = frozen ? frozen->shs : f.shs.psi_c_logits;

    const Vector target = one_hot(num_tasks, ex.task);
    Vector g_attr, g_task, g_total, g_fused;
    const double ce_attr = clamped_cross_entropy(f.shs.psi_a, ex.attr_target, &g_attr);
    const double ce_task = clamped_cross_entropy(f.shs.psi_c_logits, target, &g_task);
    double ce_th = clamped_cross_entropy(f.ths.total_logits, target, &g_total);
    Matrix g_stage(f.ths.stage_logits.rows(), num_tasks);
    for (Index k = 0; k < f.ths.stage_logits.rows(); ++k) {
      Vector gk;
      ce_th += clamped_cross_entropy(f.ths.stage_logits.row(k).transpose(), target, &gk);
      g_stage.row(k) = gk.transpose();
    }
    const double ce_f = clamped_cross_entropy(f.fusion.logits, target, &g_fused);

    loss.semantic += (lambda * ce_attr + (1.0 - lambda) * ce_task) / n;
    loss.temporal += ce_th / n;
    loss.fusion += ce_f / n;

    if (grad == nullptr) continue;
    const LossWeights& lw = opts.weights;
    Vector dpsi_a = (lw.semantic * lambda / n) * g_attr;
    Vector dpsi_c = (lw.semantic * (1.0 - lambda) / n) * g_task;
    Vector dtotal = (lw.temporal * beta / n) * g_total;
    Matrix dstage = (lw.temporal * beta / n) * g_stage;
    const Vector dfused = (lw.fusion / n) * g_fused;
    if (stop || frozen != nullptr) {
      fusion_backward(dfused, fused_ths, fused_shs, w.fusion, grad->fusion);
    } else {
      fusion_backward(dfused, fused_ths, fused_shs, w.fusion, grad->fusion, &dtotal, &dpsi_c);
    }
    Matrix dphi = shs_backward(f.enc.phi, f.shs, dpsi_a, dpsi_c, w.shs, tfidf_mask, grad->shs);
    dphi += ths_backward(f.enc.phi, f.ths, dtotal, dstage, w.ths, grad->ths);
    encode_backward(f.enc, dphi, w.encoder, grad->encoder);
  }
  const LossWeights& lw = opts.weights;
  loss.total = lw.fusion * loss.fusion + lw.semantic * loss.semantic + lw.temporal * beta * loss.temporal;
  if (!std::isfinite(loss.total)) {
    throw DataError("non-finite loss (semantic=" + std::to_string(loss.semantic) +
                    ", temporal=" + std::to_string(loss.temporal) +
                    ", fusion=" + std::to_string(loss.fusion) + ")");
  }
  return loss;
}

}  // namespace htm
