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

#include <algorithm>
#include <cmath>
#include <random>

#include "htm/metrics.hpp"
#include "oracles.hpp"

using namespace htm;

TEST_CASE("segmentation metrics hand example") {
  // gt (bg,a,a,b), pred (bg,a,b,b)
  const auto m = segmentation_metrics({0, 1, 2, 2}, {0, 1, 1, 2});
  CHECK(m.acc == 0.75);
  CHECK(m.acc_bg == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.iou == 0.5);
  CHECK(m.iod == 0.75);
}

TEST_CASE("perfect and empty predictions") {
  const std::vector<int> gt{0, 3, 3, 1, 1, 0, 2};
  const auto same = segmentation_metrics(gt, gt);
  CHECK(same.acc == 1.0);
  CHECK(same.acc_bg == 1.0);
  CHECK(same.iou == 1.0);
  CHECK(same.iod == 1.0);
  const auto none = segmentation_metrics({0, 0, 0, 0}, {0, 4, 4, 0});
  CHECK(none.acc_bg == 0.0);
  CHECK(none.iou == 0.0);
  CHECK(none.iod == 0.0);
  CHECK_THROWS_AS(segmentation_metrics({0}, {0, 1}), DataError);
}

TEST_CASE("segmentation metrics match the set-algebra oracle") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    const int classes = 2 + static_cast<int>(rng() % 4);
    std::vector<int> pred(n), gt(n);
    for (auto& x : pred) x = static_cast<int>(rng() % classes);
    for (auto& x : gt) x = static_cast<int>(rng() % classes);
    const auto m = segmentation_metrics(pred, gt);
    const auto o = htm::testing::metrics_oracle(pred, gt, 0);
    CHECK(std::abs(m.acc - o.acc) < 1e-12);
    CHECK(std::abs(m.acc_bg - o.acc_bg) < 1e-12);
    if (o.has_classes) {
      CHECK(std::abs(m.iou - o.iou) < 1e-12);
      CHECK(std::abs(m.iod - o.iod) < 1e-12);
    }
  }
}

TEST_CASE("metrics are invariant under relabeling that fixes background") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<int> perm{1, 2, 3, 4, 5};
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.insert(perm.begin(), 0);
    std::vector<int> pred(n), gt(n), pred2(n), gt2(n);
    for (std::size_t t = 0; t < n; ++t) {
      pred[t] = static_cast<int>(rng() % 6);
      gt[t] = static_cast<int>(rng() % 6);
      pred2[t] = perm[pred[t]];
      gt2[t] = perm[gt[t]];
    }
    const auto a = segmentation_metrics(pred, gt), b = segmentation_metrics(pred2, gt2);
    CHECK(a.acc == b.acc);
    CHECK(a.acc_bg == b.acc_bg);
    CHECK(std::abs(a.iou - b.iou) < 1e-12);
    CHECK(std::abs(a.iod - b.iod) < 1e-12);
  }
}

TEST_CASE("corpus aggregation pools frames and averages overlap per video") {
  const auto a = segmentation_metrics({0, 1, 2, 2}, {0, 1, 1, 2});
  const auto b = segmentation_metrics({1, 1}, {1, 1});
  const auto agg = aggregate({a, b});
  CHECK(agg.acc == doctest::Approx(5.0 / 6.0));
  CHECK(agg.acc_bg == doctest::Approx(4.0 / 5.0));
  CHECK(agg.iou == doctest::Approx(0.75));
  CHECK(agg.iod == doctest::Approx(0.875));
}

TEST_CASE("average precision at positives") {
  Matrix scores(3, 2);
  scores << 0.9, 0.1,
            0.8, 0.2,
            0.7, 0.3;
  const auto m = task_metrics(scores, {0, 1, 0});
  CHECK(m.ap[0] == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));
  CHECK(m.ap[0] == doctest::Approx(0.8333).epsilon(1e-4));
}

TEST_CASE("perfect scores, tie rules and excluded tasks") {
  const Matrix eye = Matrix::Identity(3, 3);
  const auto perfect = task_metrics(eye, {0, 1, 2});
  CHECK(perfect.t_acc == 1.0);
  CHECK(perfect.t_map == 1.0);

  const auto tie = task_metrics(Matrix::Constant(2, 2, 0.5), {0, 1});
  CHECK(tie.t_acc == 0.5);
  CHECK(tie.predictions == std::vector<int>{0, 0});

  Diagnostics d;
  const auto missing = task_metrics(eye, {0, 1, 1}, &d);
  CHECK(std::isnan(missing.ap[2]));
  CHECK(d.size() == 1);
  CHECK(missing.t_map == doctest::Approx((1.0 + (1.0 + 2.0 / 3.0) / 2.0) / 2.0));
}

TEST_CASE("task accuracy is the mean of per-video correctness") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 15);
    Matrix s = Matrix::NullaryExpr(n, 4, [&] { return u(rng); });
    std::vector<int> gt(n);
    for (auto& g : gt) g = static_cast<int>(rng() % 4);
    const auto m = task_metrics(s, gt);
    double correct = 0.0;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      s.row(i).maxCoeff(&best);
      correct += best == gt[i];
    }
    CHECK(m.t_acc == doctest::Approx(correct / n).epsilon(1e-15));
  }
}

TEST_CASE("report renders json and a table") {
  EvalReport r;
  r.t_acc = 0.5;
  r.task_names = {"tea", "eggs"};
  r.task_ap = {1.0, 0.5};
  const auto json = r.to_json();
  CHECK(json.find("\"t_acc\"") != std::string::npos);
  CHECK(r.to_table().find("t-acc") != std::string::npos);
}
