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

#include <cstdint>
#include <string>
#include <vector>

#include "htm/model.hpp"

namespace htm {

/// Small random model + batch used for finite-difference checks.
struct GradInstance {
  Trainables weights;
  Matrix mask;
  std::vector<Matrix> features;
  std::vector<int> tasks;
  std::vector<Vector> targets;

  std::vector<Example> batch() const;
};

struct GradInstanceShape {
  Index feature_dim = 6;
  Index hidden_dim = 8;
  Index encoder_dim = 4;
  int kernel_size = 3;
  int attributes = 5;
  int tasks = 3;
  int stages = 2;
  Index frames = 20;
  int batch = 2;
  int pool_divisor = 8;
  FusionMode fusion = FusionMode::kGated;
};

GradInstance make_grad_instance(const GradInstanceShape& shape, std::uint64_t seed);

struct TensorCheck {
  std::string name;
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  bool analytic_all_zero = true;
};

struct GradCheckReport {
  std::string objective;
  std::vector<TensorCheck> tensors;
  double max_rel_err = 0.0;
};

/// Relative error with an absolute floor: |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Compares analytic gradients of the weighted objective against central differences with the
/// forward realization (dropout mask, dropped stage, top-k sets) held fixed. When the fusion
/// stop contract applies, the numeric side evaluates the fusion term on frozen stream logits.
GradCheckReport check_gradients(const GradInstance& inst, const LossWeights& which,
                                const std::string& label, double step = 1e-4,
                                std::uint64_t seed = 11);

/// The four standard checks: L_sh, L_th, L_f, and the total objective.
std::vector<GradCheckReport> standard_gradchecks(const GradInstance& inst, double step = 1e-4);

}  // namespace htm
