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

#include "htm/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace htm {

std::vector<Example> GradInstance::batch() const {
  std::vector<Example> out;
  for (std::size_t i = 0; i < features.size(); ++i) out.push_back({&features[i], tasks[i], targets[i]});
  return out;
}

GradInstance make_grad_instance(const GradInstanceShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto randn = [&](Index r, Index c) { return Matrix(Matrix::NullaryExpr(r, c, [&] { return normal(rng); })); };

  TrainConfig cfg;
  cfg.hidden_dim = static_cast<int>(shape.hidden_dim);
  cfg.encoder_dim = static_cast<int>(shape.encoder_dim);
  cfg.kernel_size = shape.kernel_size;
  cfg.stages = shape.stages;
  cfg.pool_divisor = shape.pool_divisor;
  cfg.fusion_mode = shape.fusion;

  GradInstance inst;
  inst.weights = init_trainables(shape.feature_dim, shape.attributes, shape.tasks, cfg, rng);
  // Non-zero biases and gates so every path carries signal.
  inst.weights.encoder.g_bias = 0.3 * randn(shape.hidden_dim, 1);
  inst.weights.shs.attr_bias = 0.3 * randn(shape.attributes, 1);
  for (auto& b : inst.weights.ths.stage_biases) b = 0.3 * randn(shape.tasks, 1);
  if (shape.fusion == FusionMode::kGated) inst.weights.fusion.w_alpha = randn(shape.tasks, 1);

  std::bernoulli_distribution coin(0.6);
  inst.mask = Matrix::Zero(shape.attributes, shape.tasks);
  for (int c = 0; c < shape.tasks; ++c) {
    for (int j = 0; j < shape.attributes; ++j) inst.mask(j, c) = coin(rng) ? 1.0 : 0.0;
    inst.mask(c % shape.attributes, c) = 1.0;
  }

  std::uniform_int_distribution<int> task(0, shape.tasks - 1);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int i = 0; i < shape.batch; ++i) {
    inst.features.push_back(randn(shape.feature_dim, shape.frames));
    inst.tasks.push_back(task(rng));
    Vector target = Vector::Zero(shape.attributes);
    for (int j = 0; j < shape.attributes; ++j) target[j] = coin(rng) ? unit(rng) : 0.0;
    target[i % shape.attributes] += 0.5;
    inst.targets.push_back(target / target.sum());
  }
  return inst;
}

double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport check_gradients(const GradInstance& inst, const LossWeights& which,
                                const std::string& label, double step, std::uint64_t seed) {
  const auto batch = inst.batch();
  std::mt19937_64 rng(seed);

  // Base pass: sample the realization, record stream logits, and take analytic gradients.
  std::vector<Realization> realization;
  std::vector<StreamLogits> streams;
  BatchOptions base;
  base.weights = which;
  base.rng = &rng;
  base.record = &realization;
  base.record_streams = &streams;
  Trainables analytic = inst.weights.zeros_like();
  batch_objective(inst.weights, inst.mask, batch, base, &analytic);

  BatchOptions probe;
  probe.weights = which;
  probe.fixed = &realization;
  if (fusion_stops_stream_gradient(inst.weights.fusion.mode)) probe.frozen_streams = &streams;

  Trainables work = inst.weights;
  auto params = tensors(work);
  auto grads = tensors(analytic);
  GradCheckReport report;
  report.objective = label;
  for (std::size_t ti = 0; ti < params.size(); ++ti) {
    TensorCheck tc;
    tc.name = params[ti].name;
    for (Index e = 0; e < params[ti].size(); ++e) {
      double& x = params[ti].data[e];
      const double saved = x;
      x = saved + step;
      const double up = batch_objective(work, inst.mask, batch, probe).total;
      x = saved - step;
      const double down = batch_objective(work, inst.mask, batch, probe).total;
      x = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grads[ti].data[e];
      if (a != 0.0) tc.analytic_all_zero = false;
      tc.max_abs_err = std::max(tc.max_abs_err, std::abs(a - numeric));
      tc.max_rel_err = std::max(tc.max_rel_err, relative_error(a, numeric));
    }
    report.max_rel_err = std::max(report.max_rel_err, tc.max_rel_err);
    report.tensors.push_back(std::move(tc));
  }
  return report;
}

std::vector<GradCheckReport> standard_gradchecks(const GradInstance& inst, double step) {
  return {
      check_gradients(inst, {0.0, 1.0, 0.0}, "L_sh", step),
      check_gradients(inst, {0.0, 0.0, 1.0}, "L_th", step),
      check_gradients(inst, {1.0, 0.0, 0.0}, "L_f", step),
      check_gradients(inst, {1.0, 1.0, 1.0}, "L_total", step),
  };
}

}  // namespace htm
