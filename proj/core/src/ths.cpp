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

#include "htm/ths.hpp"

#include "htm/nn.hpp"

namespace htm {

std::vector<std::pair<Index, Index>> stage_bounds(Index frames, int stages) {
  if (stages < 1) throw ConfigError("stage count K must be >= 1");
  if (frames < stages) throw DataError("video shorter than stage count");
  const Index d = frames / stages;
  std::vector<std::pair<Index, Index>> out;
  for (int k = 0; k < stages; ++k) {
    out.emplace_back(k * d, k == stages - 1 ? frames : (k + 1) * d);
  }
  return out;
}

Matrix stage_summaries(const Matrix& phi, int stages) {
  const auto bounds = stage_bounds(phi.cols(), stages);
  Matrix h(stages, phi.rows());
  for (int k = 0; k < stages; ++k) {
    const auto [b, e] = bounds[k];
    h.row(k) = phi.middleCols(b, e - b).rowwise().mean().transpose();
  }
  return h;
}

Matrix stage_logits(const Matrix& h, const ThsParams& params) {
  if (h.rows() != params.stages()) throw DataError("stage count mismatch");
  const Index tasks = params.stage_biases.front().size();
  Matrix out(h.rows(), tasks);
  for (int k = 0; k < params.stages(); ++k) {
    out.row(k) = (params.stage_weights[k] * h.row(k).transpose() + params.stage_biases[k]).transpose();
  }
  return out;
}

Matrix stage_dropout_at(const Matrix& values, int dropped) {
  const double stages = static_cast<double>(values.rows());
  Matrix out = values * (stages / (stages - 1.0));
  out.row(dropped).setZero();
  return out;
}

Matrix stage_dropout(const Matrix& values, bool train, std::mt19937_64* rng, int* dropped,
                     Diagnostics* diags) {
  if (dropped != nullptr) *dropped = -1;
  if (!train) return values;
  if (values.rows() < 2) {
    diag(diags, "stage dropout with K=1 leaves the single stage unmasked");
    return values;
  }
  std::uniform_int_distribution<int> pick(0, static_cast<int>(values.rows()) - 1);
  const int k = pick(*rng);
  if (dropped != nullptr) *dropped = k;
  return stage_dropout_at(values, k);
}

Vector aggregate_stages(const Matrix& masked, const Matrix& w_total) {
  const Index tasks = masked.cols();
  Vector flat(masked.size());
  for (Index k = 0; k < masked.rows(); ++k) {
    flat.segment(k * tasks, tasks) = masked.row(k).transpose().cwiseMax(0.0);
  }
  return w_total.transpose() * flat;
}

ThsOutputs ths_forward(const Matrix& phi, const ThsParams& params, bool train,
                       std::mt19937_64* rng, int fixed_dropped) {
  ThsOutputs out;
  out.h = stage_summaries(phi, params.stages());
  out.stage_logits = stage_logits(out.h, params);
  out.stage_probs.resize(out.stage_logits.rows(), out.stage_logits.cols());
  for (Index k = 0; k < out.stage_logits.rows(); ++k) {
    out.stage_probs.row(k) = softmax(out.stage_logits.row(k).transpose()).transpose();
  }
  if (train && fixed_dropped >= 0) {
    out.dropped = fixed_dropped;
    out.masked = stage_dropout_at(out.stage_logits, fixed_dropped);
  } else if (train && fixed_dropped == -1) {
    out.masked = out.stage_logits;
  } else {
    out.masked = stage_dropout(out.stage_logits, train, rng, &out.dropped);
  }
  out.total_logits = aggregate_stages(out.masked, params.w_total);
  out.total_probs = softmax(out.total_logits);
  return out;
}

double temporal_loss(const std::vector<ThsOutputs>& batch, const std::vector<int>& tasks) {
  if (batch.empty()) throw std::invalid_argument("temporal_loss on empty batch");
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Index num_tasks = batch[i].total_logits.size();
    const Vector target = one_hot(num_tasks, tasks[i]);
    loss += clamped_cross_entropy(batch[i].total_logits, target);
    for (Index k = 0; k < batch[i].stage_logits.rows(); ++k) {
      loss += clamped_cross_entropy(batch[i].stage_logits.row(k).transpose(), target);
    }
  }
  return loss / static_cast<double>(batch.size());
}

Matrix ths_backward(const Matrix& phi, const ThsOutputs& out, const Vector& dtotal_logits,
                    const Matrix& dstage_logits, const ThsParams& params, ThsParams& grad) {
  const int stages = params.stages();
  const Index tasks = out.stage_logits.cols();
  Vector flat(stages * tasks);
  for (int k = 0; k < stages; ++k) {
    flat.segment(k * tasks, tasks) = out.masked.row(k).transpose().cwiseMax(0.0);
  }
  grad.w_total.noalias() += flat * dtotal_logits.transpose();
  const Vector dflat = params.w_total * dtotal_logits;

  const double scale = out.dropped >= 0 ? stages / (stages - 1.0) : 1.0;
  Matrix dlogits = dstage_logits;
  for (int k = 0; k < stages; ++k) {
    if (k == out.dropped) continue;
    for (Index c = 0; c < tasks; ++c) {
      if (out.masked(k, c) > 0.0) dlogits(k, c) += dflat[k * tasks + c] * scale;
    }
  }

  const auto bounds = stage_bounds(phi.cols(), stages);
  Matrix dphi = Matrix::Zero(phi.rows(), phi.cols());
  for (int k = 0; k < stages; ++k) {
    const Vector d = dlogits.row(k).transpose();
    grad.stage_weights[k].noalias() += d * out.h.row(k);
    grad.stage_biases[k] += d;
    const auto [b, e] = bounds[k];
    const Vector dh = params.stage_weights[k].transpose() * d / static_cast<double>(e - b);
    dphi.middleCols(b, e - b).colwise() += dh;
  }
  return dphi;
}

}  // namespace htm
