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

#include "htm/fusion.hpp"

#include "htm/nn.hpp"

namespace htm {

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "average") return FusionMode::kAverage;
  if (name == "weighted") return FusionMode::kWeighted;
  if (name == "gated") return FusionMode::kGated;
  throw ConfigError("unknown fusion mode: " + name);
}

std::string fusion_mode_name(FusionMode mode) {
  switch (mode) {
    case FusionMode::kAverage: return "average";
    case FusionMode::kWeighted: return "weighted";
    case FusionMode::kGated: return "gated";
  }
  throw ConfigError("unknown fusion mode");
}

bool fusion_stops_stream_gradient(FusionMode mode) { return mode != FusionMode::kAverage; }

FusionOutputs fuse(const Vector& ths_logits, const Vector& shs_logits, const FusionParams& params,
                   Phase phase) {
  FusionOutputs out;
  switch (params.mode) {
    case FusionMode::kAverage:
      out.logits = 0.5 * (ths_logits + shs_logits);
      break;
    case FusionMode::kWeighted:
      out.logits = params.w1 * ths_logits + params.w2 * shs_logits;
      break;
    case FusionMode::kGated: {
      out.alpha = params.w_alpha.unaryExpr([](double w) { return sigmoid(w); });
      Vector gate = out.alpha;
      if (phase == Phase::kEval) {
        gate = (out.alpha.array() >= 0.5).cast<double>();
      }
      out.logits = gate.cwiseProduct(ths_logits) + (1.0 - gate.array()).matrix().cwiseProduct(shs_logits);
      break;
    }
  }
  out.probs = softmax(out.logits);
  return out;
}

void fusion_backward(const Vector& dlogits, const Vector& ths_logits, const Vector& shs_logits,
                     const FusionParams& params, FusionParams& grad, Vector* dths, Vector* dshs) {
  switch (params.mode) {
    case FusionMode::kAverage:
      if (dths) *dths += 0.5 * dlogits;
      if (dshs) *dshs += 0.5 * dlogits;
      break;
    case FusionMode::kWeighted:
      grad.w1.noalias() += dlogits * ths_logits.transpose();
      grad.w2.noalias() += dlogits * shs_logits.transpose();
      if (dths) *dths += params.w1.transpose() * dlogits;
      if (dshs) *dshs += params.w2.transpose() * dlogits;
      break;
    case FusionMode::kGated: {
      for (Index c = 0; c < dlogits.size(); ++c) {
        const double a = sigmoid(params.w_alpha[c]);
        grad.w_alpha[c] += dlogits[c] * (ths_logits[c] - shs_logits[c]) * a * (1.0 - a);
        if (dths) (*dths)[c] += dlogits[c] * a;
        if (dshs) (*dshs)[c] += dlogits[c] * (1.0 - a);
      }
      break;
    }
  }
}

int predict_task(const Vector& scores) { return argmax(scores); }

}  // namespace htm
