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

#include <doctest.h>

#include <cmath>
#include <random>

#include "htm/gradcheck.hpp"
#include "htm/nn.hpp"
#include "htm/ths.hpp"

using namespace htm;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Matrix::NullaryExpr(r, c, [&] { return n(rng); });
}

ThsParams random_ths(std::mt19937_64& rng, int stages, Index dim, Index tasks) {
  ThsParams p;
  for (int k = 0; k < stages; ++k) {
    p.stage_weights.push_back(random_matrix(rng, tasks, dim));
    p.stage_biases.push_back(random_matrix(rng, tasks, 1));
  }
  p.w_total = random_matrix(rng, stages * tasks, tasks);
  return p;
}

double ce(const Vector& logits, int target) {
  double z = 0.0;
  for (Index i = 0; i < logits.size(); ++i) z += std::exp(logits[i]);
  return -(logits[target] - std::log(z));
}

}  // namespace

TEST_CASE("stage summaries are per-stage means") {
  Matrix phi(1, 6);
  phi << 0, 1, 2, 3, 4, 5;
  const Matrix h = stage_summaries(phi, 3);
  CHECK(h(0, 0) == 0.5);
  CHECK(h(1, 0) == 2.5);
  CHECK(h(2, 0) == 4.5);
  CHECK(stage_summaries(Matrix::Constant(3, 10, 1.25), 4) == Matrix::Constant(4, 3, 1.25));
}

TEST_CASE("the last stage absorbs the remainder") {
  const auto b = stage_bounds(7, 3);
  REQUIRE(b.size() == 3);
  CHECK(b[0].second - b[0].first == 2);
  CHECK(b[1].second - b[1].first == 2);
  CHECK(b[2].second - b[2].first == 3);
  CHECK(b[2].second == 7);
  CHECK_THROWS_AS(stage_bounds(2, 3), DataError);
}

TEST_CASE("a single stage is the global mean") {
  std::mt19937_64 rng(1);
  const Matrix phi = random_matrix(rng, 4, 11);
  CHECK((stage_summaries(phi, 1).transpose() - phi.rowwise().mean()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stage logits") {
  std::mt19937_64 rng(2);
  ThsParams p = random_ths(rng, 3, 4, 2);
  const Matrix h = random_matrix(rng, 3, 4);
  const Matrix out = stage_logits(h, p);
  for (int k = 0; k < 3; ++k) {
    for (Index c = 0; c < 2; ++c) {
      double s = p.stage_biases[k][c];
      for (Index f = 0; f < 4; ++f) s += p.stage_weights[k](c, f) * h(k, f);
      CHECK(std::abs(out(k, c) - s) < 1e-6);
    }
  }
  for (auto& w : p.stage_weights) w.setZero();
  const Matrix biases = stage_logits(h, p);
  for (int k = 0; k < 3; ++k) CHECK(biases.row(k).transpose() == p.stage_biases[k]);
}

TEST_CASE("stage dropout masks one row and rescales the rest") {
  Matrix v(3, 2);
  v << 1, 2, 3, 4, 5, 6;
  const Matrix out = stage_dropout_at(v, 1);
  CHECK(out.row(0) == 1.5 * v.row(0));
  CHECK(out.row(1).isZero());
  CHECK(out.row(2) == 1.5 * v.row(2));
  CHECK(stage_dropout(v, false, nullptr) == v);

  std::mt19937_64 rng(3);
  int dropped = -1;
  const Matrix sampled = stage_dropout(v, true, &rng, &dropped);
  REQUIRE(dropped >= 0);
  CHECK(sampled == stage_dropout_at(v, dropped));

  Diagnostics d;
  CHECK(stage_dropout(v.topRows(1), true, &rng, &dropped, &d) == v.topRows(1));
  CHECK(dropped == -1);
  CHECK(d.size() == 1);
}

TEST_CASE("averaging stage dropout over every choice returns the input") {
  std::mt19937_64 rng(4);
  for (int K : {2, 3, 5}) {
    const Matrix v = random_matrix(rng, K, 4);
    Matrix mean = Matrix::Zero(K, 4);
    for (int k = 0; k < K; ++k) mean += stage_dropout_at(v, k);
    mean /= K;
    CHECK((mean - v).cwiseAbs().maxCoeff() <= 1e-15 * v.cwiseAbs().maxCoeff() * K);
  }
}

TEST_CASE("aggregation") {
  std::mt19937_64 rng(5);
  const int K = 3;
  const Index C = 4;
  Matrix stacked(K * C, C);
  for (int k = 0; k < K; ++k) stacked.block(k * C, 0, C, C) = Matrix::Identity(C, C) / K;
  const Matrix logits = random_matrix(rng, K, C);
  const Vector mean = logits.cwiseMax(0.0).colwise().mean().transpose();
  CHECK((aggregate_stages(logits, stacked) - mean).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(aggregate_stages(-logits.cwiseAbs(), stacked).isZero());

  const Matrix w = random_matrix(rng, K * C, C);
  const Vector got = aggregate_stages(logits, w);
  for (Index c = 0; c < C; ++c) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) {
      for (Index j = 0; j < C; ++j) s += w(k * C + j, c) * std::max(0.0, logits(k, j));
    }
    CHECK(std::abs(got[c] - s) < 1e-6);
  }
}

TEST_CASE("temporal loss structure and a hand-computed case") {
  ThsOutputs out;
  out.stage_logits = Matrix(2, 2);
  out.stage_logits << 0.5, -0.5, 1.0, 2.0;
  out.total_logits = Vector(2);
  out.total_logits << 0.3, 0.1;
  const double expect = ce(out.total_logits, 1) + ce(out.stage_logits.row(0).transpose(), 1) +
                        ce(out.stage_logits.row(1).transpose(), 1);
  CHECK(temporal_loss({out}, {1}) == doctest::Approx(expect).epsilon(1e-12));

  ThsOutputs single;
  single.stage_logits = out.stage_logits.topRows(1);
  single.total_logits = out.total_logits;
  CHECK(temporal_loss({single}, {0}) ==
        doctest::Approx(ce(out.total_logits, 0) + ce(single.stage_logits.row(0).transpose(), 0)));

  ThsOutputs sure;
  sure.stage_logits = Matrix(2, 2);
  sure.stage_logits << 50, -50, 50, -50;
  sure.total_logits = Vector(2);
  sure.total_logits << 50, -50;
  CHECK(temporal_loss({sure}, {0}) < 1e-12);
}

TEST_CASE("temporal stream eval forward has no dropout") {
  std::mt19937_64 rng(6);
  const ThsParams p = random_ths(rng, 3, 4, 2);
  const Matrix phi = random_matrix(rng, 4, 12);
  const auto out = ths_forward(phi, p, false, nullptr);
  CHECK(out.dropped == -1);
  CHECK(out.masked == out.stage_logits);
  CHECK((out.total_probs.sum() - 1.0) < 1e-12);
}

TEST_CASE("temporal loss gradients match finite differences") {
  for (int stages : {1, 2, 3}) {
    GradInstanceShape shape;
    shape.stages = stages;
    const auto inst = make_grad_instance(shape, 30 + stages);
    const auto report = check_gradients(inst, {0.0, 0.0, 1.0}, "temporal");
    CHECK(report.max_rel_err < 1e-4);
  }
}
