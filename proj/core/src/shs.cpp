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

#include "htm/shs.hpp"

#include <algorithm>
#include <numeric>

#include "htm/nn.hpp"

namespace htm {

Matrix tcam(const Matrix& phi, const ShsParams& params) {
  if (phi.rows() != params.attr_weight.cols()) throw DataError("T-CAM input dimension mismatch");
  Matrix out = params.attr_weight * phi;
  out.colwise() += params.attr_bias;
  return out;
}

Vector topk_pool(const Matrix& scores, int s, TopkSelection* selection) {
  const Index frames = scores.cols();
  const Index k = std::max<Index>(1, frames / std::max(1, s));
  Vector out(scores.rows());
  if (selection != nullptr) selection->assign(scores.rows(), {});
  std::vector<Index> order(frames);
  for (Index j = 0; j < scores.rows(); ++j) {
    std::iota(order.begin(), order.end(), 0);
    auto row = scores.row(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
      return row[a] > row[b] || (row[a] == row[b] && a < b);
    });
    double sum = 0.0;
    for (Index i = 0; i < k; ++i) sum += row[order[i]];
    out[j] = sum / static_cast<double>(k);
    if (selection != nullptr) (*selection)[j].assign(order.begin(), order.begin() + k);
  }
  return out;
}

Vector topk_pool_fixed(const Matrix& scores, const TopkSelection& selection) {
  Vector out(scores.rows());
  for (Index j = 0; j < scores.rows(); ++j) {
    double sum = 0.0;
    for (Index t : selection[j]) sum += scores(j, t);
    out[j] = sum / static_cast<double>(selection[j].size());
  }
  return out;
}

TaskScores shs_task_scores(const Vector& psi_a, const Matrix& wc, const Matrix& mask) {
  TaskScores out;
  out.logits = wc.cwiseProduct(mask.transpose()) * relu(psi_a);
  out.probs = softmax(out.logits);
  return out;
}

ShsOutputs shs_forward(const Matrix& phi, const ShsParams& params, const Matrix& mask,
                       const TopkSelection* fixed_selection) {
  ShsOutputs out;
  out.tcam = tcam(phi, params);
  if (fixed_selection != nullptr) {
    out.selection = *fixed_selection;
    out.psi_a = topk_pool_fixed(out.tcam, out.selection);
  } else {
    out.psi_a = topk_pool(out.tcam, params.s, &out.selection);
  }
  auto scores = shs_task_scores(out.psi_a, params.wc, mask);
  out.psi_c_logits = std::move(scores.logits);
  out.psi_c_probs = std::move(scores.probs);
  out.psi_a_probs = softmax(out.psi_a);
  return out;
}

double semantic_loss(const std::vector<ShsOutputs>& batch, const std::vector<Vector>& attr_targets,
                     const std::vector<int>& tasks, double lambda) {
  if (batch.empty()) throw std::invalid_argument("semantic_loss on empty batch");
  double attr = 0.0, task = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    attr += clamped_cross_entropy(batch[i].psi_a, attr_targets[i]);
    task += clamped_cross_entropy(batch[i].psi_c_logits,
                                  one_hot(batch[i].psi_c_logits.size(), tasks[i]));
  }
  const double n = static_cast<double>(batch.size());
  return lambda * attr / n + (1.0 - lambda) * task / n;
}

Matrix shs_backward(const Matrix& phi, const ShsOutputs& out, const Vector& dpsi_a_in,
                    const Vector& dpsi_c_logits, const ShsParams& params, const Matrix& mask,
                    ShsParams& grad) {
  const Matrix mask_t = mask.transpose();
  const Vector act = relu(out.psi_a);
  grad.wc.noalias() += (dpsi_c_logits * act.transpose()).cwiseProduct(mask_t);
  Vector drelu = params.wc.cwiseProduct(mask_t).transpose() * dpsi_c_logits;
  Vector dpsi_a = dpsi_a_in;
  for (Index j = 0; j < dpsi_a.size(); ++j) {
    if (out.psi_a[j] > 0.0) dpsi_a[j] += drelu[j];
  }

  Matrix dtcam = Matrix::Zero(out.tcam.rows(), out.tcam.cols());
  for (Index j = 0; j < dtcam.rows(); ++j) {
    const double share = dpsi_a[j] / static_cast<double>(out.selection[j].size());
    for (Index t : out.selection[j]) dtcam(j, t) += share;
  }
  grad.attr_weight.noalias() += dtcam * phi.transpose();
  grad.attr_bias += dtcam.rowwise().sum();
  return params.attr_weight.transpose() * dtcam;
}

}  // namespace htm
