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

#include "htm/tfidf.hpp"

#include <cmath>

namespace htm {

TfidfTables build_tfidf(const Corpus& corpus, double eps, Diagnostics* diags) {
  const int num_attrs = corpus.vocab.num_attributes();
  const int num_tasks = corpus.vocab.num_tasks();
  TfidfTables t;
  t.eps = eps;
  t.tf = Matrix::Zero(num_attrs, num_tasks);
  Vector videos_per_task = Vector::Zero(num_tasks);
  for (const auto& v : corpus.videos) {
    videos_per_task[v.task] += 1.0;
    for (int j : v.attributes) t.tf(j, v.task) += 1.0;
  }
  for (int c = 0; c < num_tasks; ++c) {
    if (videos_per_task[c] > 0) t.tf.col(c) /= videos_per_task[c];
  }

  t.idf = Vector::Zero(num_attrs);
  for (int j = 0; j < num_attrs; ++j) {
    int tasks_with = 0;
    for (int c = 0; c < num_tasks; ++c) tasks_with += t.tf(j, c) > 0.0 ? 1 : 0;
    if (tasks_with == 0) {
      diag(diags, "attribute '" + corpus.vocab.attributes[j] + "' appears in no video; idf set to 0");
      continue;
    }
    t.idf[j] = std::log(static_cast<double>(num_tasks) / tasks_with);
  }

  const Matrix numer = t.tf.array().colwise() * t.idf.array();
  t.w = Matrix::Zero(num_attrs, num_tasks);
  for (int c = 0; c < num_tasks; ++c) t.w.col(c) = numer.col(c) / (eps + numer.col(c).sum());
  t.mask = (t.w.array() > 0.0).cast<double>();
  return t;
}

Vector weighted_attribute_target(const VideoRecord& video, const TfidfTables& tables) {
  if (video.attributes.empty()) throw DataError("video with no attributes: " + video.id);
  Vector out = Vector::Zero(tables.w.rows());
  double total = 0.0;
  for (int j : video.attributes) {
    out[j] = tables.w(j, video.task);
    total += out[j];
  }
  if (total > 0.0) return out / total;
  const double uniform = 1.0 / static_cast<double>(video.attributes.size());
  for (int j : video.attributes) out[j] = uniform;
  return out;
}

}  // namespace htm
