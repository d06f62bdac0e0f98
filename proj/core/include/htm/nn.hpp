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

#include <cmath>

#include "htm/types.hpp"

namespace htm {

/// Floor applied to log-probabilities inside cross-entropies.
inline constexpr double kLogFloor = -30.0;

inline Vector log_softmax(const Vector& z) {
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return z.array() - lse;
}

inline Vector softmax(const Vector& z) {
  return log_softmax(z).array().exp();
}

inline Vector relu(const Vector& z) { return z.cwiseMax(0.0); }

inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// -target . max(log_softmax(logits), kLogFloor). Writes d/dlogits into grad when given.
inline double clamped_cross_entropy(const Vector& logits, const Vector& target,
                                    Vector* grad = nullptr) {
  const Vector logp = log_softmax(logits);
  double loss = 0.0;
  Vector active = Vector::Zero(target.size());
  for (Index j = 0; j < target.size(); ++j) {
    if (target[j] == 0.0) continue;
    if (logp[j] > kLogFloor) {
      loss -= target[j] * logp[j];
      active[j] = target[j];
    } else {
      loss -= target[j] * kLogFloor;
    }
  }
  if (grad != nullptr) *grad = logp.array().exp() * active.sum() - active.array();
  return loss;
}

inline Vector one_hot(Index size, Index hot) {
  Vector v = Vector::Zero(size);
  v[hot] = 1.0;
  return v;
}

/// argmax with ties broken by the lowest index.
inline int argmax(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace htm
