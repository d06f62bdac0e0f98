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
#include <random>

#include "htm/tfidf.hpp"
#include "oracles.hpp"

using namespace htm;

namespace {

// task0 videos {a,b},{a}; task1 video {a,c}
Corpus three_video_corpus() {
  Corpus c;
  c.vocab = Vocabularies::identity({"t0", "t1"}, {"a", "b", "c"});
  auto add = [&](const std::string& id, int task, ActionSeq tr) {
    VideoRecord v;
    v.id = id;
    v.task = task;
    v.transcript = std::move(tr);
    v.attributes = attributes_of(v.transcript, c.vocab);
    v.features = Matrix::Zero(1, 2);
    c.videos.push_back(std::move(v));
  };
  add("v0", 0, {1, 2});
  add("v1", 0, {1});
  add("v2", 1, {1, 3});
  return c;
}

}  // namespace

TEST_CASE("tf, idf, weights and mask on the three-video corpus") {
  const Corpus c = three_video_corpus();
  const auto t = build_tfidf(c);
  CHECK(t.tf(0, 0) == 1.0);
  CHECK(t.tf(1, 0) == 0.5);
  CHECK(t.tf(2, 0) == 0.0);
  CHECK(t.tf(0, 1) == 1.0);
  CHECK(t.tf(1, 1) == 0.0);
  CHECK(t.tf(2, 1) == 1.0);
  CHECK(t.idf[0] == 0.0);
  CHECK(t.idf[1] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(t.idf[2] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(t.w(0, 0) == 0.0);
  CHECK(t.w(1, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(t.w(2, 0) == 0.0);
  CHECK(t.w(2, 1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(t.mask.sum() == 2.0);
  CHECK(t.mask(1, 0) == 1.0);
  CHECK(t.mask(2, 1) == 1.0);
}

TEST_CASE("weighted targets and the zero-weight fallback") {
  const Corpus c = three_video_corpus();
  const auto t = build_tfidf(c);
  const Vector ab = weighted_attribute_target(c.videos[0], t);
  CHECK(ab[0] == 0.0);
  CHECK(ab[1] == doctest::Approx(1.0));
  CHECK(ab[2] == 0.0);
  const Vector a = weighted_attribute_target(c.videos[1], t);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);
}

TEST_CASE("an attribute in every task gets zero weight") {
  const auto t = build_tfidf(three_video_corpus());
  CHECK(t.w.row(0).cwiseAbs().sum() == 0.0);
}

TEST_CASE("single-task corpus is fully degenerate") {
  Corpus c = three_video_corpus();
  c.vocab.tasks = {"only"};
  for (auto& v : c.videos) v.task = 0;
  const auto t = build_tfidf(c);
  CHECK(t.idf.cwiseAbs().sum() == 0.0);
  CHECK(t.w.cwiseAbs().sum() == 0.0);
  CHECK(t.mask.sum() == 0.0);
}

TEST_CASE("equal weights give a uniform target over the video's attributes") {
  Corpus c;
  c.vocab = Vocabularies::identity({"t0", "t1"}, {"a", "b", "c", "d"});
  auto add = [&](int task, ActionSeq tr) {
    VideoRecord v;
    v.id = "v" + std::to_string(c.videos.size());
    v.task = task;
    v.transcript = std::move(tr);
    v.attributes = attributes_of(v.transcript, c.vocab);
    v.features = Matrix::Zero(1, 1);
    c.videos.push_back(std::move(v));
  };
  add(0, {1, 2});
  add(1, {3, 4});
  const Vector target = weighted_attribute_target(c.videos[0], build_tfidf(c));
  CHECK(target[0] == doctest::Approx(0.5));
  CHECK(target[1] == doctest::Approx(0.5));
  CHECK(target[2] == 0.0);
}

TEST_CASE("random corpora match the definition-level oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Corpus c = htm::testing::random_label_corpus(rng, 6, 4, 20);
    const auto t = build_tfidf(c);
    const auto o = htm::testing::tfidf_oracle(c, t.eps);
    const int A = c.vocab.num_attributes(), C = c.vocab.num_tasks();
    for (int j = 0; j < A; ++j) {
      CHECK(std::abs(t.idf[j] - o.idf[j]) <= 1e-12);
      for (int k = 0; k < C; ++k) {
        CHECK(std::abs(t.tf(j, k) - o.tf[j][k]) <= 1e-12);
        CHECK(std::abs(t.w(j, k) - o.w[j][k]) <= 1e-12);
        CHECK(t.mask(j, k) == o.mask[j][k]);
      }
    }
    for (int k = 0; k < C; ++k) {
      const double col = t.w.col(k).sum();
      CHECK((col == 0.0 || std::abs(col - 1.0) <= 1e-6));  // eps in the denominator
    }
    for (const auto& v : c.videos) {
      const Vector target = weighted_attribute_target(v, t);
      const auto expect = htm::testing::weighted_target_oracle(v, o);
      CHECK(std::abs(target.sum() - 1.0) <= 1e-12);
      for (int j = 0; j < A; ++j) {
        CHECK(std::abs(target[j] - expect[j]) <= 1e-12);
        if (!v.attributes.count(j)) CHECK(target[j] == 0.0);
      }
    }
  }
}

TEST_CASE("video order does not change the tables") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Corpus c = htm::testing::random_label_corpus(rng, 6, 4, 20);
    const auto a = build_tfidf(c);
    std::shuffle(c.videos.begin(), c.videos.end(), rng);
    const auto b = build_tfidf(c);
    CHECK((a.tf - b.tf).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((a.w - b.w).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(a.mask == b.mask);
  }
}

TEST_CASE("unused attributes are reported") {
  Corpus c = three_video_corpus();
  c.vocab = Vocabularies::identity({"t0", "t1"}, {"a", "b", "c", "unused"});
  Diagnostics d;
  const auto t = build_tfidf(c, 1e-8, &d);
  CHECK(t.idf[3] == 0.0);
  CHECK_FALSE(d.empty());
}
